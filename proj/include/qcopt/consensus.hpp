#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qcopt/errors.hpp"
#include "qcopt/graph.hpp"
#include "qcopt/numeric.hpp"

namespace qcopt {

struct ConsensusTraceRow {
  long round;
  int node;
  Int y;     // token mass held after delivery
  long z;    // token count held after delivery
  Int max_estimate;  // M
  Int min_estimate;  // m
  int sends;         // tokens sent by this node during the round
};

struct ConsensusOptions {
  Rational basis = Rational(0);   // reported value = basis + level * delta
  long round_cap = 1'000'000;     // NonConvergence beyond this; never expected
  std::vector<ConsensusTraceRow>* trace = nullptr;
};

struct ConsensusResult {
  Int level;               // common floor estimate m at termination
  Rational value;          // basis + level * delta, identical at every node
  long rounds = 0;         // lambda at termination
  long long transmissions = 0;   // token sends, self-delivery included
  long long mm_messages = 0;     // (M, m) stopping broadcasts, one per edge per round
};

/// Finite-time quantized average consensus.
///
/// Inputs are integer levels rho_i (mid-rise floor levels of the node
/// states). Each node starts with token mass y_i = 2 * rho_i + 1 and token
/// count z_i = 2, so the network-wide token average is exactly
/// mean(rho) + 1/2 — the mid-rise average of the quantized states.
///
/// Synchronous rounds: every window of W = max(diameter, 1) rounds each node
/// snapshots ceiling/floor estimates of its local token average, floods them
/// through max/min exchanges with in-neighbors, and meanwhile keeps splitting
/// its tokens: while it holds more than one token it peels off a token worth
/// floor(y/z) and sends it to a uniformly random member of its out-neighbors
/// plus itself, retaining exactly one token. All sends of a round are
/// delivered together at the end of the round. Once a flooded window shows
/// max - min <= 1 every node fixes the value basis + m * delta and halts;
/// since the flood has spanned a full diameter by then, all nodes hold the
/// same m and stop in the same round.
///
/// Token mass and token count are conserved every round; a breach throws
/// ProtocolViolation. The per-invocation RNG consumes draws in node-index
/// order, so a (graph, rho, seed) triple replays identically.
inline ConsensusResult run_consensus(const Digraph& g, const std::vector<Int>& rho,
                                     const Rational& delta, std::uint64_t seed,
                                     const ConsensusOptions& opt) {
  const int n = g.node_count();
  if (static_cast<int>(rho.size()) != n) throw Error("one level per node required");
  if (delta <= 0) throw Error("quantization level must be positive");
  if (!g.strongly_connected())
    throw NotStronglyConnected("consensus requires a strongly connected digraph");

  const long window = std::max(g.diameter(), 1);

  std::vector<Int> y(static_cast<std::size_t>(n));
  std::vector<long> z(static_cast<std::size_t>(n), 2);
  Int mass = 0;
  for (int i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] = 2 * rho[static_cast<std::size_t>(i)] + 1;
    mass += y[static_cast<std::size_t>(i)];
  }

  std::vector<Int> max_est(static_cast<std::size_t>(n));
  std::vector<Int> min_est(static_cast<std::size_t>(n));
  std::vector<Int> inbox_y(static_cast<std::size_t>(n));
  std::vector<long> inbox_z(static_cast<std::size_t>(n));
  std::vector<int> sends(static_cast<std::size_t>(n));

  Rng rng(seed);
  ConsensusResult result;

  for (long round = 1; round <= opt.round_cap; ++round) {
    // Window reset: fresh ceiling/floor estimates of the local average.
    if ((round - 1) % window == 0) {
      for (int i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        max_est[u] = ceil_div(y[u], Int(z[u]));
        min_est[u] = floor_div(y[u], Int(z[u]));
      }
    }

    // One synchronous max/min flood step over in-neighborhoods.
    {
      std::vector<Int> next_max(max_est);
      std::vector<Int> next_min(min_est);
      for (int i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        for (int j : g.in_neighbors(i)) {
          const auto w = static_cast<std::size_t>(j);
          if (max_est[w] > next_max[u]) next_max[u] = max_est[w];
          if (min_est[w] < next_min[u]) next_min[u] = min_est[w];
        }
      }
      max_est.swap(next_max);
      min_est.swap(next_min);
      result.mm_messages += static_cast<long long>(g.edge_count());
    }

    // Token splitting; deliveries buffered until every node has sent.
    std::fill(inbox_y.begin(), inbox_y.end(), Int(0));
    std::fill(inbox_z.begin(), inbox_z.end(), 0L);
    std::fill(sends.begin(), sends.end(), 0);
    for (int i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      long pending = z[u];
      while (pending > 1) {
        const Int piece = floor_div(y[u], Int(z[u]));
        y[u] -= piece;
        z[u] -= 1;
        pending -= 1;
        const auto& out = g.out_neighbors(i);
        const std::uint64_t pick = rng.below(out.size() + 1);
        const int target = pick == out.size() ? i : out[static_cast<std::size_t>(pick)];
        const auto t = static_cast<std::size_t>(target);
        inbox_y[t] += piece;
        inbox_z[t] += 1;
        ++result.transmissions;
        ++sends[u];
      }
    }
    for (int i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      y[u] += inbox_y[u];
      z[u] += inbox_z[u];
    }

    // Conservation of token mass and token count.
    {
      Int sum_y = 0;
      long sum_z = 0;
      for (int i = 0; i < n; ++i) {
        sum_y += y[static_cast<std::size_t>(i)];
        sum_z += z[static_cast<std::size_t>(i)];
      }
      if (sum_y != mass || sum_z != 2L * n)
        throw ProtocolViolation("token mass not conserved at round " + std::to_string(round));
    }

    if (opt.trace) {
      for (int i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        opt.trace->push_back({round, i, y[u], z[u], max_est[u], min_est[u], sends[u]});
      }
    }

    // Stopping check at the end of each window; by now the flood has covered
    // a full diameter so the window extrema are network-wide.
    if (round % window == 0) {
      bool all_done = true;
      for (int i = 0; i < n && all_done; ++i) {
        const auto u = static_cast<std::size_t>(i);
        all_done = max_est[u] - min_est[u] <= 1;
      }
      if (all_done) {
        for (int i = 1; i < n; ++i) {
          const auto u = static_cast<std::size_t>(i);
          if (min_est[u] != min_est[0] || max_est[u] != max_est[0])
            throw ProtocolViolation("stopping estimates disagree across nodes");
        }
        result.level = min_est[0];
        result.value = opt.basis + Rational(result.level) * delta;
        result.rounds = round;
        return result;
      }
    }
  }

  throw NonConvergence("consensus exceeded the round cap of " + std::to_string(opt.round_cap));
}

inline ConsensusResult run_consensus(const Digraph& g, const std::vector<Int>& rho,
                                     const Rational& delta, std::uint64_t seed) {
  return run_consensus(g, rho, delta, seed, ConsensusOptions{});
}

template <class T>
struct FloodOutcome {
  std::vector<T> values;    // identical entries after a full flood
  long long messages = 0;   // one value per out-edge per round
  long rounds = 0;          // exactly the diameter
};

namespace detail {

template <class T, class Better>
FloodOutcome<T> flood_consensus(const Digraph& g, std::vector<T> values, Better better) {
  const int n = g.node_count();
  if (static_cast<int>(values.size()) != n) throw Error("one value per node required");
  if (!g.strongly_connected())
    throw NotStronglyConnected("flooding requires a strongly connected digraph");
  FloodOutcome<T> out;
  out.rounds = g.diameter();
  for (long r = 0; r < out.rounds; ++r) {
    std::vector<T> next(values);
    for (int i = 0; i < n; ++i) {
      for (int j : g.in_neighbors(i)) {
        const auto u = static_cast<std::size_t>(i);
        const auto w = static_cast<std::size_t>(j);
        if (better(values[w], next[u])) next[u] = values[w];
      }
    }
    values.swap(next);
    out.messages += static_cast<long long>(g.edge_count());
  }
  out.values = std::move(values);
  return out;
}

}  // namespace detail

/// Max flooding over exactly diameter() synchronous rounds; afterwards every
/// node holds the global maximum.
template <class T>
FloodOutcome<T> max_consensus(const Digraph& g, const std::vector<T>& votes) {
  return detail::flood_consensus(g, votes, [](const T& a, const T& b) { return a > b; });
}

template <class T>
FloodOutcome<T> min_consensus(const Digraph& g, const std::vector<T>& values) {
  return detail::flood_consensus(g, values, [](const T& a, const T& b) { return a < b; });
}

}  // namespace qcopt
