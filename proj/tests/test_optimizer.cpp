#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "qcopt/experiments.hpp"
#include "qcopt/optimizer.hpp"

using namespace qcopt;

namespace {

Digraph complete_digraph(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s)
      if (r != s) edges.emplace_back(r, s);
  return Digraph(n, std::move(edges));
}

// 20-node target-localization style instance: curvatures and measurement
// centers drawn from {1..5}, initial estimates in [1, 5].
Instance standard_instance(std::uint64_t trial_seed) {
  ExperimentConfig cfg;
  cfg.n = 20;
  cfg.edge_probability = 0.3;
  return build_instance(cfg, trial_seed);
}

Rational delta_ledger(const RunResult& run) {
  Rational expected = run.config.delta0;
  for (long i = 0; i < run.refinements; ++i) expected /= run.config.refine_divisor;
  for (long i = 0; i < run.zoom_outs; ++i) expected *= run.config.zoom_out;
  for (long i = 0; i < run.zoom_ins; ++i) expected /= run.config.zoom_in;
  return expected;
}

}  // namespace

TEST_CASE("single-node descent plateaus within two levels of the optimum") {
  Digraph g(1, {});
  CostEnsemble costs({{Rational(1), Rational(2)}});  // f = (x-2)^2 / 2
  OptimizerConfig cfg;
  cfg.alpha = Rational(1, 2);
  cfg.delta0 = Rational(1, 10);
  cfg.max_outer_steps = 30;
  const RunResult run = run_alg1(g, costs, {Rational(0)}, cfg, 7);

  CHECK(run.final_x() == Rational(19, 10));  // the lattice point below 2
  CHECK(abs_rational(run.final_x() - Rational(2)) <= 2 * cfg.delta0);
  CHECK_FALSE(run.convergence_points.empty());
  // x climbs monotonically toward the optimum on this instance
  Rational prev(0);
  for (const auto& rec : run.steps) {
    CHECK(rec.x_hat >= prev);
    prev = rec.x_hat;
  }
}

TEST_CASE("an exact quantizer fixed point at the optimum never moves") {
  const Digraph g = complete_digraph(2);
  CostEnsemble costs({{Rational(1), Rational(1)}, {Rational(1), Rational(3)}});
  REQUIRE(costs.global_optimum() == 2);
  OptimizerConfig cfg;
  cfg.alpha = Rational(1, 2);
  cfg.delta0 = Rational(1, 10);
  cfg.max_outer_steps = 12;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RunResult run = run_alg1(g, costs, {Rational(2), Rational(2)}, cfg, seed);
    for (const auto& rec : run.steps) CHECK(rec.x_hat == Rational(2));
    CHECK(run.cause == StopCause::step_cap);
  }
}

TEST_CASE("estimates stay on the quantization lattice") {
  const Instance inst = standard_instance(3);
  OptimizerConfig cfg;
  cfg.max_outer_steps = 25;
  const RunResult run = run_alg1(inst.graph, inst.costs, inst.x0, cfg, inst.run_seed);
  for (const auto& rec : run.steps) {
    const Rational offset = (rec.x_hat - rec.basis) / rec.delta;
    CHECK(denominator(offset) == 1);
  }
}

TEST_CASE("step-size validation") {
  const Digraph g = complete_digraph(2);
  CostEnsemble costs({{Rational(1), Rational(0)}, {Rational(1), Rational(4)}});
  OptimizerConfig cfg;
  cfg.alpha = Rational(3);  // above 2n/(mu+L) = 4/3
  cfg.max_outer_steps = 4;
  CHECK_THROWS_AS(run_alg1(g, costs, {Rational(0), Rational(1)}, cfg, 1), StepSizeTooLarge);
  cfg.unsafe_alpha = true;
  CHECK_NOTHROW(run_alg1(g, costs, {Rational(0), Rational(1)}, cfg, 1));
  cfg.unsafe_alpha = false;
  cfg.alpha = Rational(4, 3);  // the bound itself is admissible
  CHECK_NOTHROW(run_alg1(g, costs, {Rational(0), Rational(1)}, cfg, 1));
}

TEST_CASE("plateau patience stops a stationary run early") {
  Digraph g(1, {});
  CostEnsemble costs({{Rational(1), Rational(2)}});
  OptimizerConfig cfg;
  cfg.alpha = Rational(1, 2);
  cfg.delta0 = Rational(1, 10);
  cfg.max_outer_steps = 60;
  cfg.plateau_patience = 3;
  const RunResult run = run_alg1(g, costs, {Rational(0)}, cfg, 7);
  CHECK(run.cause == StopCause::plateau);
  CHECK(run.steps.size() < 60);
}

TEST_CASE("unbounded thresholds terminate at the first convergence point") {
  const Instance inst = standard_instance(11);
  OptimizerConfig cfg;
  cfg.max_outer_steps = 80;
  // eps_s1 / eps_s2 default to +inf
  const RunResult run = run_alg3(inst.graph, inst.costs, inst.x0, cfg, inst.run_seed);
  CHECK(run.cause == StopCause::vote);
  CHECK(run.convergence_points.size() == 1);
  CHECK(run.steps.back().event == StepEvent::terminate);
  CHECK(recheck_termination(run, inst.costs));
  CHECK(run.refinements == 0);
}

TEST_CASE("zero thresholds never terminate; refinement ledger stays exact") {
  const Instance inst = standard_instance(4);
  OptimizerConfig cfg;
  cfg.message_range = parse_rational("6.4");
  cfg.max_outer_steps = 50;
  cfg.eps_s1 = Rational(0);
  cfg.eps_s2 = Rational(0);
  const RunResult run = run_alg3(inst.graph, inst.costs, inst.x0, cfg, inst.run_seed);
  CHECK(run.cause == StopCause::step_cap);
  CHECK(run.refinements >= 3);
  CHECK(run.final_delta == delta_ledger(run));

  // deltas are non-increasing along the run and error improves with depth
  Rational prev_delta = cfg.delta0;
  for (const auto& rec : run.steps) {
    CHECK(rec.delta <= prev_delta);
    prev_delta = rec.delta;
  }
  const Rational x_star = inst.costs.global_optimum();
  const auto& first = run.steps[static_cast<std::size_t>(run.convergence_points.front())];
  CHECK(abs_rational(run.final_x() - x_star) < abs_rational(first.x_hat - x_star));
}

TEST_CASE("refinement runs satisfy the contraction envelope and consensus band exactly") {
  const Instance inst = standard_instance(9);
  OptimizerConfig cfg;
  cfg.message_range = parse_rational("6.4");
  cfg.max_outer_steps = 40;
  cfg.eps_s1 = Rational(0);
  cfg.eps_s2 = Rational(0);
  const RunResult run = run_alg3(inst.graph, inst.costs, inst.x0, cfg, inst.run_seed);
  for (const auto& check : verify_run_bounds(run, inst.costs)) {
    CHECK(check.envelope_ok);
    CHECK(check.band_checked);
    CHECK(check.band_ok);
  }
}

TEST_CASE("vote termination is sound: a central recheck confirms every node") {
  // shared measurement center: per-node gradients vanish at the optimum, so
  // the thresholds are reachable
  std::vector<QuadraticCost> costs;
  Rng rng(41);
  for (int i = 0; i < 12; ++i) costs.emplace_back(Rational(rng.pick(1, 5)), Rational(3));
  CostEnsemble ensemble(std::move(costs));
  const Digraph g = random_strongly_connected(12, 0.3, 21);
  std::vector<Rational> x0;
  for (int i = 0; i < 12; ++i) x0.push_back(Rational(1 + (i % 4)));

  OptimizerConfig cfg;
  cfg.message_range = parse_rational("6.4");
  cfg.max_outer_steps = 300;
  cfg.eps_s1 = Rational(1, 1000);
  cfg.eps_s2 = Rational(1, 1000);
  const RunResult run = run_alg3(g, ensemble, x0, cfg, 2);
  REQUIRE(run.cause == StopCause::vote);
  CHECK(recheck_termination(run, ensemble));
  // explicit audit of the recorded thresholds at the final convergence point
  const Rational x_final = run.final_x();
  for (int i = 0; i < ensemble.size(); ++i)
    CHECK(abs_rational(ensemble[i].gradient(x_final)) <= *cfg.eps_s2);
}

TEST_CASE("zoom ledger: delta = delta0 * c_out^outs / c_in^ins at all times") {
  const Instance inst = standard_instance(6);
  OptimizerConfig cfg;
  cfg.max_outer_steps = 60;
  cfg.eps_s1 = Rational(1, 100000);
  cfg.eps_s2 = Rational(1, 100000);
  const RunResult run = run_alg4(inst.graph, inst.costs, inst.x0, cfg, inst.run_seed);
  CHECK(run.final_delta == delta_ledger(run));
  CHECK(run.zoom_ins + run.zoom_outs + (run.cause == StopCause::vote ? 1 : 0) ==
        static_cast<long>(run.convergence_points.size()));

  // replay the ledger event by event
  Rational delta = cfg.delta0;
  for (const auto& rec : run.steps) {
    CHECK(rec.delta == delta);
    if (rec.event == StepEvent::zoom_out) delta *= cfg.zoom_out;
    if (rec.event == StepEvent::zoom_in) delta /= cfg.zoom_in;
  }
}

TEST_CASE("the quantizer basis tracks the shared estimate through zoom events") {
  const Instance inst = standard_instance(14);
  OptimizerConfig cfg;
  cfg.max_outer_steps = 50;
  cfg.eps_s1 = Rational(1, 100000);
  cfg.eps_s2 = Rational(1, 100000);
  const RunResult run = run_alg4(inst.graph, inst.costs, inst.x0, cfg, inst.run_seed);
  Rational basis = cfg.basis0;
  for (const auto& rec : run.steps) {
    CHECK(rec.basis == basis);
    if (rec.event == StepEvent::zoom_in || rec.event == StepEvent::zoom_out) basis = rec.x_hat;
  }
}

TEST_CASE("an in-range optimum with unbounded thresholds needs no zoom-out") {
  const Digraph g = complete_digraph(2);
  CostEnsemble costs({{Rational(1), Rational(1, 10)}, {Rational(1), Rational(1, 10)}});
  OptimizerConfig cfg;
  cfg.alpha = Rational(1, 2);
  cfg.max_outer_steps = 40;
  const std::vector<Rational> x0{Rational(1, 5), Rational(3, 20)};
  const RunResult run = run_alg4(g, costs, x0, cfg, 5);
  CHECK(run.cause == StopCause::vote);
  CHECK(run.zoom_outs == 0);
  CHECK(run.convergence_points.size() == 1);
}

TEST_CASE("frozen-basis zoom-out count matches the coverage bound") {
  // Single node, curvature 5 at the admissible step-size bound: the gradient
  // step lands exactly on the target 10, so the run is fully deterministic.
  Digraph g(1, {});
  CostEnsemble costs({{Rational(5), Rational(10)}});
  OptimizerConfig cfg;
  cfg.alpha = Rational(1, 5);  // = 2n/(mu+L)
  cfg.delta0 = Rational(1, 10);
  cfg.half_levels = 3;
  cfg.zoom_out = Rational(2);
  cfg.zoom_in = Rational(4, 3);
  cfg.eps_s1 = Rational(0);
  cfg.eps_s2 = Rational(0);
  cfg.max_outer_steps = 40;
  cfg.freeze_basis = true;

  const Rational x_star = costs.global_optimum();
  REQUIRE(x_star == 10);
  const RunResult frozen = run_alg4(g, costs, {Rational(1, 20)}, cfg, 3);

  // count zoom-outs until the frozen range (-N delta, N delta) covers x*
  long outs_at_coverage = -1, outs = 0;
  Rational delta = cfg.delta0;
  for (const auto& rec : frozen.steps) {
    if (rec.event == StepEvent::zoom_out) {
      ++outs;
      delta *= cfg.zoom_out;
      if (outs_at_coverage < 0 && x_star < cfg.half_levels * delta &&
          x_star > -cfg.half_levels * delta)
        outs_at_coverage = outs;
    } else if (rec.event == StepEvent::zoom_in) {
      delta /= cfg.zoom_in;
    }
  }
  REQUIRE(outs_at_coverage > 0);
  // ceil(log2(x* / (N delta0))) = ceil(log2(100/3)) = 6
  const long bound = ceil_log2(x_star / (cfg.half_levels * cfg.delta0));
  CHECK(bound == 6);
  CHECK(outs_at_coverage == 6);

  // live basis updates can only speed coverage up
  cfg.freeze_basis = false;
  const RunResult live = run_alg4(g, costs, {Rational(1, 20)}, cfg, 3);
  long live_outs_at_coverage = -1, live_outs = 0;
  delta = cfg.delta0;
  Rational basis = cfg.basis0;
  for (const auto& rec : live.steps) {
    if (rec.event == StepEvent::zoom_out) {
      ++live_outs;
      basis = rec.x_hat;
      delta *= cfg.zoom_out;
      if (live_outs_at_coverage < 0 && abs_rational(x_star - basis) < cfg.half_levels * delta)
        live_outs_at_coverage = live_outs;
    } else if (rec.event == StepEvent::zoom_in) {
      basis = rec.x_hat;
      delta /= cfg.zoom_in;
    }
  }
  REQUIRE(live_outs_at_coverage > 0);
  CHECK(live_outs_at_coverage <= outs_at_coverage);
}

TEST_CASE("contraction helper reproduces the closed-form constants") {
  // alpha at the admissible bound with n=20, L=60, mu=1
  const Rational alpha(40, 61);
  CHECK(contraction_rate(alpha, Rational(1), 20) == Rational(59, 61));
  CHECK(envelope_term(alpha, Rational(60), 20, Rational(1, 10)) == Rational(301, 305));
  CHECK(to_double(contraction_rate(alpha, Rational(1), 20)) == doctest::Approx(0.9672).epsilon(1e-4));

  // with x_prev at the optimum the bound degenerates to the envelope term
  const Rational envelope = envelope_term(alpha, Rational(60), 20, Rational(1, 10));
  CHECK(check_contraction(Rational(5), Rational(5) + envelope, Rational(5), alpha, Rational(1),
                          Rational(60), 20, Rational(1, 10)));
  CHECK_FALSE(check_contraction(Rational(5), Rational(5) + envelope + Rational(1, 1000000),
                                Rational(5), alpha, Rational(1), Rational(60), 20,
                                Rational(1, 10)));
}

TEST_CASE("mismatched sizes and invalid constants are rejected") {
  const Digraph g = complete_digraph(2);
  CostEnsemble costs({{Rational(1), Rational(0)}, {Rational(1), Rational(4)}});
  OptimizerConfig cfg;
  CHECK_THROWS_AS(run_alg1(g, costs, {Rational(0)}, cfg, 1), Error);
  cfg.refine_divisor = 1;
  CHECK_THROWS_AS(run_alg3(g, costs, {Rational(0), Rational(1)}, cfg, 1), ConfigError);
  cfg.refine_divisor = 2;
  cfg.zoom_in = Rational(1);
  CHECK_THROWS_AS(run_alg4(g, costs, {Rational(0), Rational(1)}, cfg, 1), ConfigError);
}
