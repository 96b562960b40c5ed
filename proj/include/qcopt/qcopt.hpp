#pragma once

// Distributed optimization over strongly connected digraphs with quantized
// inter-node communication: finite-time quantized average consensus, three
// gradient-descent drivers (fixed level, event-triggered refinement, N-bit
// adaptive zoom), and the experiment/bit-accounting harness around them.

#include "qcopt/config.hpp"
#include "qcopt/consensus.hpp"
#include "qcopt/costs.hpp"
#include "qcopt/errors.hpp"
#include "qcopt/experiments.hpp"
#include "qcopt/graph.hpp"
#include "qcopt/log.hpp"
#include "qcopt/metrics.hpp"
#include "qcopt/numeric.hpp"
#include "qcopt/optimizer.hpp"
#include "qcopt/quantizer.hpp"
