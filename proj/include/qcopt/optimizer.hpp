#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qcopt/consensus.hpp"
#include "qcopt/costs.hpp"
#include "qcopt/errors.hpp"
#include "qcopt/graph.hpp"
#include "qcopt/numeric.hpp"
#include "qcopt/quantizer.hpp"

namespace qcopt {

enum class Algorithm { alg1, alg3, alg4 };

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::alg1: return "alg1";
    case Algorithm::alg3: return "alg3";
    case Algorithm::alg4: return "alg4";
  }
  return "?";
}

inline Algorithm algorithm_from_name(std::string_view name) {
  if (name == "alg1") return Algorithm::alg1;
  if (name == "alg3") return Algorithm::alg3;
  if (name == "alg4") return Algorithm::alg4;
  throw ConfigError("unknown algorithm '" + std::string(name) + "' (expected alg1|alg3|alg4)");
}

struct OptimizerConfig {
  Rational alpha{3, 25};                 // step size
  Rational delta0{1, 10};                // initial quantization level
  std::optional<Rational> eps_s1;        // improvement threshold; empty = +inf
  std::optional<Rational> eps_s2;        // gradient-norm threshold; empty = +inf
  long refine_divisor = 2;               // c_r, integer >= 2
  Rational zoom_in{4, 3};                // c_in > 1
  Rational zoom_out{2};                  // c_out > 1
  long half_levels = 3;                  // N, levels per side of the bounded quantizer
  Rational basis0{0};                    // initial quantizer basis b_q
  int max_outer_steps = 60;
  int plateau_patience = 0;              // alg1: stop after this many repeats; 0 = full horizon
  bool unsafe_alpha = false;             // skip the 2n/(mu+L) step-size check
  bool freeze_basis = false;             // diagnostics: keep b_q fixed through zoom events
  long consensus_round_cap = 1'000'000;
  std::optional<int> message_width;      // fixed token message width (unbounded quantizer)
  std::optional<Rational> message_range; // value range for derived widths
};

enum class StepEvent { none, converged, refine, zoom_in, zoom_out, terminate };

inline const char* step_event_name(StepEvent e) {
  switch (e) {
    case StepEvent::none: return "";
    case StepEvent::converged: return "converged_point";
    case StepEvent::refine: return "refine";
    case StepEvent::zoom_in: return "zoom_in";
    case StepEvent::zoom_out: return "zoom_out";
    case StepEvent::terminate: return "terminate";
  }
  return "";
}

struct StepRecord {
  int step = 0;            // 1-based; x_hat is the shared estimate x^[step]
  Rational x_hat;          // post-consensus estimate, identical at every node
  Rational z_hat;          // network mean of the pre-consensus gradient states
  Rational delta;          // quantization level used by this step's consensus
  Rational basis;          // quantizer basis in force (0 for the unbounded quantizer)
  StepEvent event = StepEvent::none;
  int bits_per_message = 0;
  long long transmissions = 0;
  long long mm_messages = 0;
  long long vote_messages = 0;
  long rounds = 0;
  int clamped = 0;         // payloads that hit the bounded range this step
};

enum class StopCause { step_cap, vote, plateau };

inline const char* stop_cause_name(StopCause c) {
  switch (c) {
    case StopCause::step_cap: return "step_cap";
    case StopCause::vote: return "vote";
    case StopCause::plateau: return "plateau";
  }
  return "?";
}

struct RunResult {
  Algorithm algorithm = Algorithm::alg1;
  OptimizerConfig config;
  std::vector<Rational> x0;            // per-node initial estimates
  std::vector<StepRecord> steps;
  StopCause cause = StopCause::step_cap;
  std::vector<int> convergence_points; // gamma_1, gamma_2, ... (0-based outer steps)
  long zoom_ins = 0;                   // nu_in
  long zoom_outs = 0;                  // nu_out
  long refinements = 0;                // level refinements performed (alg3)
  Rational final_delta;
  Rational final_basis;

  const Rational& final_x() const { return steps.back().x_hat; }

  /// Shared estimate x^[k]; k = 0 yields the mean of the initial states.
  Rational x_hat_at(int k) const {
    if (k == 0) {
      Rational sum = 0;
      for (const auto& v : x0) sum += v;
      return sum / static_cast<int>(x0.size());
    }
    return steps[static_cast<std::size_t>(k - 1)].x_hat;
  }

  long long total_transmissions() const {
    long long t = 0;
    for (const auto& s : steps) t += s.transmissions;
    return t;
  }
  long long total_mm_messages() const {
    long long t = 0;
    for (const auto& s : steps) t += s.mm_messages;
    return t;
  }
  long long total_vote_messages() const {
    long long t = 0;
    for (const auto& s : steps) t += s.vote_messages;
    return t;
  }
};

namespace detail {

inline void validate_driver_inputs(Algorithm algo, const Digraph& g, const CostEnsemble& costs,
                                   const std::vector<Rational>& x0, const OptimizerConfig& cfg) {
  const int n = g.node_count();
  if (costs.size() != n || static_cast<int>(x0.size()) != n)
    throw Error("graph, costs, and initial states must agree on the node count");
  if (!g.strongly_connected())
    throw NotStronglyConnected("Assumption 1 violated: digraph is not strongly connected");
  if (cfg.delta0 <= 0)
    throw ConfigError("Assumption 3 violated: common quantization level must be positive");
  if (cfg.alpha <= 0) throw StepSizeTooLarge("step size must be positive");
  if (!cfg.unsafe_alpha && cfg.alpha > costs.max_stepsize())
    throw StepSizeTooLarge("step size " + rational_to_string(cfg.alpha) +
                           " exceeds 2n/(mu+L) = " + rational_to_string(costs.max_stepsize()));
  if (cfg.max_outer_steps < 1) throw ConfigError("max_outer_steps must be positive");
  if (algo == Algorithm::alg3 && cfg.refine_divisor < 2)
    throw ConfigError("refinement constant c_r must be an integer >= 2");
  if (algo == Algorithm::alg4) {
    if (cfg.zoom_in <= 1 || cfg.zoom_out <= 1)
      throw ConfigError("zoom constants must be rationals > 1");
    if (cfg.half_levels < 1) throw ConfigError("bounded quantizer needs at least 1 level per side");
  }
}

inline RunResult run_driver(Algorithm algo, const Digraph& g, const CostEnsemble& costs,
                            const std::vector<Rational>& x0, const OptimizerConfig& cfg,
                            std::uint64_t seed) {
  validate_driver_inputs(algo, g, costs, x0, cfg);
  const int n = g.node_count();
  const long levels_n = cfg.half_levels;

  RunResult out;
  out.algorithm = algo;
  out.config = cfg;
  out.x0 = x0;

  std::vector<Rational> x = x0;
  Rational delta = cfg.delta0;
  Rational basis = algo == Algorithm::alg4 ? cfg.basis0 : Rational(0);

  // f_i at the previous convergence point; gamma_0 = 0 by convention, so the
  // first comparison is against the initial states.
  std::vector<Rational> f_prev(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) f_prev[static_cast<std::size_t>(i)] = costs[i].evaluate(x[static_cast<std::size_t>(i)]);

  int plateau_run = 0;

  for (int k = 0; k < cfg.max_outer_steps; ++k) {
    // Gradient step, exact on rationals.
    std::vector<Rational> z(static_cast<std::size_t>(n));
    Rational z_sum = 0;
    for (int i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      z[u] = x[u] - cfg.alpha * costs[i].gradient(x[u]);
      z_sum += z[u];
    }

    // Quantize to consensus payload levels.
    std::vector<Int> levels(static_cast<std::size_t>(n));
    int clamped = 0;
    if (algo == Algorithm::alg4) {
      const Int lo = -levels_n;
      const Int hi = levels_n - 1;
      for (int i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        Int raw = floor_rational((z[u] - basis) / delta);
        if (raw < lo) { raw = lo; ++clamped; }
        else if (raw > hi) { raw = hi; ++clamped; }
        levels[u] = raw;
      }
    } else {
      for (int i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        levels[u] = floor_rational(z[u] / delta);
      }
    }

    ConsensusOptions copt;
    copt.basis = basis;
    copt.round_cap = cfg.consensus_round_cap;
    const ConsensusResult cr = run_consensus(g, levels, delta, mix_seed(seed, static_cast<std::uint64_t>(k)), copt);

    StepRecord rec;
    rec.step = k + 1;
    rec.x_hat = cr.value;
    rec.z_hat = z_sum / n;
    rec.delta = delta;
    rec.basis = basis;
    rec.transmissions = cr.transmissions;
    rec.mm_messages = cr.mm_messages;
    rec.rounds = cr.rounds;
    rec.clamped = clamped;
    rec.bits_per_message = algo == Algorithm::alg4
                               ? bits_for_levels(2 * levels_n)
                               : bits_for_infinite_message(delta, cfg.message_width, cfg.message_range);

    // Convergence point: the shared estimate repeated exactly. At k = 0 the
    // per-node initial states must all equal the fresh estimate.
    bool converged = true;
    for (int i = 0; i < n && converged; ++i)
      converged = x[static_cast<std::size_t>(i)] == cr.value;

    bool stop_vote = false;
    if (!converged) {
      plateau_run = 0;
    } else if (algo == Algorithm::alg1) {
      rec.event = StepEvent::converged;
      out.convergence_points.push_back(k);
      ++plateau_run;
    } else {
      out.convergence_points.push_back(k);  // gamma_beta = k
      std::vector<int> votes(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const Rational f_cur = costs[i].evaluate(cr.value);
        const bool improvement_ok =
            !cfg.eps_s1 || abs_rational(f_prev[u] - f_cur) <= *cfg.eps_s1;
        const bool gradient_ok =
            !cfg.eps_s2 || abs_rational(costs[i].gradient(cr.value)) <= *cfg.eps_s2;
        votes[u] = improvement_ok && gradient_ok ? 0 : 1;
      }
      const auto flood = max_consensus(g, votes);
      rec.vote_messages = flood.messages;
      const int flag = flood.values.front();
      // gamma_beta becomes the previous convergence point for the next vote.
      for (int i = 0; i < n; ++i)
        f_prev[static_cast<std::size_t>(i)] = costs[i].evaluate(cr.value);

      if (flag == 0) {
        rec.event = StepEvent::terminate;
        stop_vote = true;
      } else if (algo == Algorithm::alg3) {
        rec.event = StepEvent::refine;
        delta /= cfg.refine_divisor;
        ++out.refinements;
      } else {
        // Saturation: the consensus output is pinned at an extreme lattice
        // level, i.e. the estimate sits at the edge of the representable
        // range [basis - N*delta, basis + (N-1)*delta].
        const bool saturated = cr.level >= Int(levels_n - 1) || cr.level <= Int(-levels_n);
        if (saturated) {
          rec.event = StepEvent::zoom_out;
          ++out.zoom_outs;
          if (!cfg.freeze_basis) basis = cr.value;
          delta *= cfg.zoom_out;
        } else {
          rec.event = StepEvent::zoom_in;
          ++out.zoom_ins;
          if (!cfg.freeze_basis) basis = cr.value;
          delta /= cfg.zoom_in;
        }
      }
    }

    out.steps.push_back(std::move(rec));
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = cr.value;

    if (stop_vote) {
      out.cause = StopCause::vote;
      break;
    }
    if (algo == Algorithm::alg1 && cfg.plateau_patience > 0 && plateau_run >= cfg.plateau_patience) {
      out.cause = StopCause::plateau;
      break;
    }
  }

  out.final_delta = delta;
  out.final_basis = basis;
  return out;
}

}  // namespace detail

/// Quantized averaged gradient descent: one gradient step per outer
/// iteration, then finite-time quantized average consensus at a fixed level.
/// Runs out its horizon (no built-in stopping rule); reports convergence
/// points and optionally stops after `plateau_patience` exact repeats.
inline RunResult run_alg1(const Digraph& g, const CostEnsemble& costs,
                          const std::vector<Rational>& x0, const OptimizerConfig& cfg,
                          std::uint64_t seed) {
  return detail::run_driver(Algorithm::alg1, g, costs, x0, cfg, seed);
}

/// Event-triggered refinement: on every exact repeat of the shared estimate
/// the nodes vote on the local improvement / gradient thresholds; an all-zero
/// vote (spread by max-consensus) terminates the run, otherwise the level is
/// divided by c_r and the descent continues.
inline RunResult run_alg3(const Digraph& g, const CostEnsemble& costs,
                          const std::vector<Rational>& x0, const OptimizerConfig& cfg,
                          std::uint64_t seed) {
  return detail::run_driver(Algorithm::alg3, g, costs, x0, cfg, seed);
}

/// Fixed-width variant: payloads pass through the 2N-level bounded quantizer,
/// and at each non-terminating convergence point the quantizer either zooms
/// out (saturated: level doubles via c_out) or zooms in (level shrinks via
/// c_in), re-centering the basis on the current estimate.
inline RunResult run_alg4(const Digraph& g, const CostEnsemble& costs,
                          const std::vector<Rational>& x0, const OptimizerConfig& cfg,
                          std::uint64_t seed) {
  return detail::run_driver(Algorithm::alg4, g, costs, x0, cfg, seed);
}

/// 1 - alpha * mu / n, the per-step contraction factor.
inline Rational contraction_rate(const Rational& alpha, const Rational& mu, int n) {
  return 1 - alpha * mu / n;
}

/// (4 alpha L / n + 2) * delta, the quantization-induced envelope term.
inline Rational envelope_term(const Rational& alpha, const Rational& lipschitz, int n,
                              const Rational& delta) {
  return (4 * alpha * lipschitz / n + 2) * delta;
}

/// Per-step contraction envelope
///   |x_next - x*| <= (1 - alpha mu / n) |x_prev - x*| + (4 alpha L / n + 2) delta
/// evaluated exactly on rationals.
inline bool check_contraction(const Rational& x_prev, const Rational& x_next,
                              const Rational& x_star, const Rational& alpha, const Rational& mu,
                              const Rational& lipschitz, int n, const Rational& delta) {
  const Rational lhs = abs_rational(x_next - x_star);
  const Rational rhs = contraction_rate(alpha, mu, n) * abs_rational(x_prev - x_star) +
                       envelope_term(alpha, lipschitz, n, delta);
  return lhs <= rhs;
}

struct StepBoundCheck {
  int step = 0;
  bool envelope_ok = true;
  bool band_checked = true;  // the 2*delta band applies only to unclamped steps
  bool band_ok = true;
};

/// Exact per-step verification of the contraction envelope and the
/// |x_hat - z_hat| <= 2*delta band along a recorded run. The band is only
/// meaningful while no payload clamped (the unbounded-quantizer analysis);
/// clamped steps are reported as unchecked.
inline std::vector<StepBoundCheck> verify_run_bounds(const RunResult& run,
                                                     const CostEnsemble& costs) {
  const Rational x_star = costs.global_optimum();
  const Rational mu = costs.convexity_floor();
  const Rational lipschitz = costs.lipschitz_total();
  const int n = costs.size();
  std::vector<StepBoundCheck> checks;
  checks.reserve(run.steps.size());
  Rational prev = run.x_hat_at(0);
  for (const auto& rec : run.steps) {
    StepBoundCheck c;
    c.step = rec.step;
    c.envelope_ok = check_contraction(prev, rec.x_hat, x_star, run.config.alpha, mu, lipschitz,
                                      n, rec.delta);
    c.band_checked = rec.clamped == 0;
    c.band_ok = !c.band_checked || abs_rational(rec.x_hat - rec.z_hat) <= 2 * rec.delta;
    checks.push_back(c);
    prev = rec.x_hat;
  }
  return checks;
}

/// Centralized post-hoc audit of a vote termination: every node must satisfy
/// both epsilon conditions at the final convergence point.
inline bool recheck_termination(const RunResult& run, const CostEnsemble& costs) {
  if (run.cause != StopCause::vote || run.convergence_points.empty()) return false;
  const int gamma = run.convergence_points.back();
  const int gamma_prev =
      run.convergence_points.size() >= 2 ? run.convergence_points[run.convergence_points.size() - 2]
                                         : 0;
  const Rational x_cur = run.x_hat_at(gamma + 1);  // == x^[gamma] by the repeat
  for (int i = 0; i < costs.size(); ++i) {
    // x^[gamma_prev] is shared for gamma_prev >= 1 and per-node at step 0.
    const Rational x_before =
        gamma_prev == 0 ? run.x0[static_cast<std::size_t>(i)] : run.x_hat_at(gamma_prev + 1);
    const Rational f_cur = costs[i].evaluate(x_cur);
    const Rational f_before = costs[i].evaluate(x_before);
    if (run.config.eps_s1 && abs_rational(f_before - f_cur) > *run.config.eps_s1) return false;
    if (run.config.eps_s2 && abs_rational(costs[i].gradient(x_cur)) > *run.config.eps_s2)
      return false;
  }
  return true;
}

}  // namespace qcopt
