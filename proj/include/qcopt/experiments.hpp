#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qcopt/config.hpp"
#include "qcopt/costs.hpp"
#include "qcopt/errors.hpp"
#include "qcopt/graph.hpp"
#include "qcopt/log.hpp"
#include "qcopt/metrics.hpp"
#include "qcopt/numeric.hpp"
#include "qcopt/optimizer.hpp"

namespace qcopt {

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::alg1;

  // graph source: a file wins over generation; without a fixed seed each
  // trial generates its own topology from the trial seed
  int n = 20;
  double edge_probability = 0.3;
  std::optional<std::uint64_t> graph_seed;
  std::optional<std::string> graph_file;

  // costs: explicit per-node lists win over set sampling
  std::vector<Rational> beta_set{1, 2, 3, 4, 5};
  std::vector<Rational> center_set{1, 2, 3, 4, 5};
  std::optional<std::vector<Rational>> beta_explicit;
  std::optional<std::vector<Rational>> center_explicit;
  Rational x0_min{1};
  Rational x0_max{5};

  OptimizerConfig opt = [] {
    OptimizerConfig o;
    o.message_range = Rational(32, 5);  // default width rule for refined levels
    return o;
  }();

  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9,
                                   10, 11, 12, 13, 14, 15, 16, 17, 18, 19};
  std::string out_dir = "out";
  bool trace = false;
};

inline ExperimentConfig experiment_from_kv(const KvConfig& kv) {
  ExperimentConfig cfg;
  cfg.algorithm = algorithm_from_name(kv.get_string("optimizer.algorithm", "alg1"));

  cfg.n = static_cast<int>(kv.get_long("graph.n", 20));
  if (cfg.n < 1) throw ConfigError("graph.n must be at least 1");
  cfg.edge_probability = kv.get_double("graph.p", 0.3);
  if (cfg.edge_probability < 0.0 || cfg.edge_probability > 1.0)
    throw ConfigError("graph.p must lie in [0, 1]");
  if (const auto file = kv.get("graph.file")) cfg.graph_file = *file;
  if (const auto seed = kv.get("graph.seed")) {
    if (*seed != "per_trial") cfg.graph_seed = std::stoull(*seed);
  }

  cfg.beta_set = kv.get_rational_list("costs.beta_set", cfg.beta_set);
  cfg.center_set = kv.get_rational_list("costs.center_set", cfg.center_set);
  if (kv.get("costs.beta")) cfg.beta_explicit = kv.get_rational_list("costs.beta", {});
  if (kv.get("costs.center")) cfg.center_explicit = kv.get_rational_list("costs.center", {});
  for (const auto& b : cfg.beta_set)
    if (b <= 0)
      throw ConfigError("Assumption 2 violated: curvature values in costs.beta_set must be positive");
  if (cfg.beta_explicit)
    for (const auto& b : *cfg.beta_explicit)
      if (b <= 0)
        throw ConfigError("Assumption 2 violated: curvature values in costs.beta must be positive");
  cfg.x0_min = kv.get_rational("costs.x0_min", cfg.x0_min);
  cfg.x0_max = kv.get_rational("costs.x0_max", cfg.x0_max);
  if (cfg.x0_min > cfg.x0_max) throw ConfigError("costs.x0_min must not exceed costs.x0_max");

  cfg.opt.alpha = kv.get_rational("optimizer.alpha", cfg.opt.alpha);
  cfg.opt.delta0 = kv.get_rational("optimizer.delta0", cfg.opt.delta0);
  if (cfg.opt.delta0 <= 0)
    throw ConfigError("Assumption 3 violated: optimizer.delta0 (common quantization level) must be positive");
  cfg.opt.eps_s1 = kv.get_threshold("optimizer.eps_s1");
  cfg.opt.eps_s2 = kv.get_threshold("optimizer.eps_s2");
  cfg.opt.refine_divisor = kv.get_long("optimizer.c_r", cfg.opt.refine_divisor);
  cfg.opt.zoom_in = kv.get_rational("optimizer.c_in", cfg.opt.zoom_in);
  cfg.opt.zoom_out = kv.get_rational("optimizer.c_out", cfg.opt.zoom_out);
  cfg.opt.half_levels = kv.get_long("optimizer.n_bits", cfg.opt.half_levels);
  cfg.opt.basis0 = kv.get_rational("optimizer.b_q0", cfg.opt.basis0);
  cfg.opt.max_outer_steps = static_cast<int>(kv.get_long("optimizer.max_outer_steps", cfg.opt.max_outer_steps));
  cfg.opt.plateau_patience = static_cast<int>(kv.get_long("optimizer.plateau_patience", cfg.opt.plateau_patience));
  cfg.opt.unsafe_alpha = kv.get_bool("optimizer.unsafe_alpha", false);
  cfg.opt.freeze_basis = kv.get_bool("optimizer.freeze_basis", false);
  cfg.opt.consensus_round_cap = kv.get_long("optimizer.consensus_round_cap", cfg.opt.consensus_round_cap);
  if (const auto w = kv.get("quantizer.width")) cfg.opt.message_width = std::stoi(*w);
  if (const auto r = kv.get("quantizer.range")) cfg.opt.message_range = parse_rational(*r);

  const long trials = kv.get_long("run.trials", 20);
  if (trials < 1) throw ConfigError("run.trials must be at least 1");
  std::vector<std::uint64_t> default_seeds;
  for (long s = 0; s < trials; ++s) default_seeds.push_back(static_cast<std::uint64_t>(s));
  cfg.seeds = kv.get_seed_list("run.seeds", default_seeds);
  cfg.out_dir = kv.get_string("run.out", cfg.out_dir);
  cfg.trace = kv.get_bool("run.trace", false);
  return cfg;
}

struct Instance {
  Digraph graph;
  CostEnsemble costs;
  std::vector<Rational> x0;
  std::uint64_t run_seed;
};

/// Deterministically samples the per-trial instance: topology, per-node
/// quadratics, and initial estimates. Sub-streams are derived from the trial
/// seed so a trial replays bit-for-bit in isolation.
inline Instance build_instance(const ExperimentConfig& cfg, std::uint64_t trial_seed) {
  auto make_graph = [&]() -> Digraph {
    if (cfg.graph_file) {
      std::ifstream in(*cfg.graph_file);
      if (!in) throw MissingTrajectory("cannot open graph file '" + *cfg.graph_file + "'");
      Digraph g = read_edge_list(in);
      if (!g.strongly_connected())
        throw ConfigError("Assumption 1 violated: graph file '" + *cfg.graph_file +
                          "' is not strongly connected");
      if (g.node_count() != cfg.n && cfg.n != 0)
        log_warn("graph file overrides configured node count");
      return g;
    }
    const std::uint64_t gseed = cfg.graph_seed ? *cfg.graph_seed : mix_seed(trial_seed, 0);
    return random_strongly_connected(cfg.n, cfg.edge_probability, gseed);
  };

  Digraph graph = make_graph();
  const int n = graph.node_count();

  std::vector<QuadraticCost> costs;
  costs.reserve(static_cast<std::size_t>(n));
  Rng cost_rng(mix_seed(trial_seed, 1));
  for (int i = 0; i < n; ++i) {
    Rational beta, center;
    if (cfg.beta_explicit) {
      if (static_cast<int>(cfg.beta_explicit->size()) != n)
        throw ConfigError("costs.beta must list one value per node");
      beta = (*cfg.beta_explicit)[static_cast<std::size_t>(i)];
    } else {
      beta = cfg.beta_set[cost_rng.below(cfg.beta_set.size())];
    }
    if (cfg.center_explicit) {
      if (static_cast<int>(cfg.center_explicit->size()) != n)
        throw ConfigError("costs.center must list one value per node");
      center = (*cfg.center_explicit)[static_cast<std::size_t>(i)];
    } else {
      center = cfg.center_set[cost_rng.below(cfg.center_set.size())];
    }
    costs.emplace_back(beta, center);
  }
  CostEnsemble ensemble(std::move(costs));
  const Rational x_star = ensemble.global_optimum();

  std::vector<Rational> x0;
  x0.reserve(static_cast<std::size_t>(n));
  Rng x0_rng(mix_seed(trial_seed, 2));
  const Rational span = cfg.x0_max - cfg.x0_min;
  for (int i = 0; i < n; ++i) {
    Rational value;
    do {
      value = cfg.x0_min + rational_from_double(x0_rng.unit()) * span;
    } while (value == x_star);  // keep the error metric well-defined
    x0.push_back(value);
  }

  return Instance{std::move(graph), std::move(ensemble), std::move(x0), mix_seed(trial_seed, 3)};
}

inline RunResult run_instance(Algorithm algorithm, const Instance& inst, const OptimizerConfig& opt) {
  switch (algorithm) {
    case Algorithm::alg1: return run_alg1(inst.graph, inst.costs, inst.x0, opt, inst.run_seed);
    case Algorithm::alg3: return run_alg3(inst.graph, inst.costs, inst.x0, opt, inst.run_seed);
    case Algorithm::alg4: return run_alg4(inst.graph, inst.costs, inst.x0, opt, inst.run_seed);
  }
  throw Error("unreachable");
}

namespace detail {

inline std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace detail

inline const char* trial_csv_header() {
  return "step,e_k,delta,b_q,b_pm,n_tt_step,bits_step,bits_cum,event,"
         "x_hat,z_hat,clamped,mm_msgs_step,vote_msgs_step,rounds,delta_exact,bq_exact";
}

/// Writes one trajectory/ledger CSV per trial. Row 0 is the initial state;
/// row k >= 1 reports the shared estimate after outer step k together with
/// the step's communication counts.
inline void write_trial_csv(std::ostream& out, const RunResult& run, const CostEnsemble& costs) {
  const Rational x_star = costs.global_optimum();
  out << trial_csv_header() << "\n";
  const double e0 = error_metric(run.x0, run.x0, x_star);
  Rational x0_mean = run.x_hat_at(0);
  out << 0 << "," << detail::fmt_g17(e0) << "," << detail::fmt_g17(to_double(run.config.delta0))
      << "," << detail::fmt_g17(to_double(run.algorithm == Algorithm::alg4 ? run.config.basis0
                                                                           : Rational(0)))
      << ",0,0,0,0,init," << detail::fmt_g17(to_double(x0_mean)) << ","
      << detail::fmt_g17(to_double(x0_mean)) << ",0,0,0,0,"
      << rational_to_string(run.config.delta0) << ","
      << rational_to_string(run.algorithm == Algorithm::alg4 ? run.config.basis0 : Rational(0))
      << "\n";
  Int bits_cum = 0;
  for (const auto& rec : run.steps) {
    const double e_k = error_metric(rec.x_hat, run.x0, x_star);
    const Int bits_step = Int(rec.bits_per_message) * rec.transmissions;
    bits_cum += bits_step;
    out << rec.step << "," << detail::fmt_g17(e_k) << "," << detail::fmt_g17(to_double(rec.delta))
        << "," << detail::fmt_g17(to_double(rec.basis)) << "," << rec.bits_per_message << ","
        << rec.transmissions << "," << bits_step.str() << "," << bits_cum.str() << ","
        << step_event_name(rec.event) << "," << detail::fmt_g17(to_double(rec.x_hat)) << ","
        << detail::fmt_g17(to_double(rec.z_hat)) << "," << rec.clamped << "," << rec.mm_messages
        << "," << rec.vote_messages << "," << rec.rounds << "," << rational_to_string(rec.delta)
        << "," << rational_to_string(rec.basis) << "\n";
  }
}

struct TrialArtifacts {
  std::uint64_t seed = 0;
  RunResult run;
  std::vector<double> errors;  // e_0, e_1, ..., aligned with CSV rows
};

/// Runs every configured trial and writes the full output contract:
/// per-trial CSVs, meta.csv, ledger_summary.csv, aggregate.csv, and optional
/// consensus traces. Outputs carry no timestamps, so identical configs and
/// seeds produce byte-identical files.
inline std::vector<TrialArtifacts> run_experiment(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);

  std::vector<TrialArtifacts> all;
  std::ofstream meta(fs::path(cfg.out_dir) / "meta.csv");
  if (!meta) throw MissingTrajectory("cannot write into output directory '" + cfg.out_dir + "'");
  meta << "trial,seed,algorithm,n,diameter,alpha,mu,L,x_star,alpha_exact,mu_exact,L_exact,"
          "x_star_exact,delta0_exact,bq0_exact,n_bits,c_r,c_in,c_out,eps_s1,eps_s2,max_outer_steps\n";

  std::ofstream ledger(fs::path(cfg.out_dir) / "ledger_summary.csv");
  ledger << "trial,seed,algorithm,steps,cause,termination_step,nu_in,nu_out,refinements,"
            "total_n_tt,total_mm_msgs,total_vote_msgs,total_bits,avg_n_tt\n";

  for (std::size_t t = 0; t < cfg.seeds.size(); ++t) {
    const std::uint64_t seed = cfg.seeds[t];
    const Instance inst = build_instance(cfg, seed);
    RunResult run = run_instance(cfg.algorithm, inst, cfg.opt);

    const Rational x_star = inst.costs.global_optimum();
    const Rational mu = inst.costs.convexity_floor();
    const Rational lipschitz = inst.costs.lipschitz_total();
    meta << t << "," << seed << "," << algorithm_name(cfg.algorithm) << ","
         << inst.graph.node_count() << "," << inst.graph.diameter() << ","
         << detail::fmt_g17(to_double(cfg.opt.alpha)) << "," << detail::fmt_g17(to_double(mu))
         << "," << detail::fmt_g17(to_double(lipschitz)) << ","
         << detail::fmt_g17(to_double(x_star)) << "," << rational_to_string(cfg.opt.alpha) << ","
         << rational_to_string(mu) << "," << rational_to_string(lipschitz) << ","
         << rational_to_string(x_star) << "," << rational_to_string(cfg.opt.delta0) << ","
         << rational_to_string(cfg.opt.basis0) << "," << cfg.opt.half_levels << ","
         << cfg.opt.refine_divisor << "," << rational_to_string(cfg.opt.zoom_in) << ","
         << rational_to_string(cfg.opt.zoom_out) << ","
         << (cfg.opt.eps_s1 ? rational_to_string(*cfg.opt.eps_s1) : "inf") << ","
         << (cfg.opt.eps_s2 ? rational_to_string(*cfg.opt.eps_s2) : "inf") << ","
         << cfg.opt.max_outer_steps << "\n";

    {
      std::ofstream trial_out(fs::path(cfg.out_dir) / ("trial_" + std::to_string(t) + ".csv"));
      write_trial_csv(trial_out, run, inst.costs);
    }

    if (cfg.trace) {
      // One trace per trial: the per-round consensus state of every outer
      // step, replayed with the recorded seeds.
      std::ofstream trace_out(fs::path(cfg.out_dir) / ("trial_" + std::to_string(t) + "_trace.csv"));
      trace_out << "step,round,node,y,z,M,m,sends\n";
      std::vector<Rational> x = inst.x0;
      for (const auto& rec : run.steps) {
        std::vector<Int> levels(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
          const Rational z = x[i] - cfg.opt.alpha * inst.costs[static_cast<int>(i)].gradient(x[i]);
          Int raw = floor_rational((z - rec.basis) / rec.delta);
          if (cfg.algorithm == Algorithm::alg4) {
            if (raw < Int(-cfg.opt.half_levels)) raw = -cfg.opt.half_levels;
            if (raw > Int(cfg.opt.half_levels - 1)) raw = cfg.opt.half_levels - 1;
          }
          levels[i] = raw;
        }
        std::vector<ConsensusTraceRow> rows;
        ConsensusOptions copt;
        copt.basis = rec.basis;
        copt.round_cap = cfg.opt.consensus_round_cap;
        copt.trace = &rows;
        run_consensus(inst.graph, levels, rec.delta, mix_seed(inst.run_seed, static_cast<std::uint64_t>(rec.step - 1)), copt);
        for (const auto& r : rows)
          trace_out << rec.step << "," << r.round << "," << r.node << "," << r.y.str() << ","
                    << r.z << "," << r.max_estimate.str() << "," << r.min_estimate.str() << ","
                    << r.sends << "\n";
        for (auto& xi : x) xi = rec.x_hat;
      }
    }

    TrialArtifacts artifacts;
    artifacts.seed = seed;
    artifacts.errors.push_back(error_metric(run.x0, run.x0, x_star));
    for (const auto& rec : run.steps)
      artifacts.errors.push_back(error_metric(rec.x_hat, run.x0, x_star));

    const auto steps = static_cast<long long>(run.steps.size());
    Int total_bits = 0;
    for (const auto& rec : run.steps) total_bits += Int(rec.bits_per_message) * rec.transmissions;
    ledger << t << "," << seed << "," << algorithm_name(cfg.algorithm) << "," << steps << ","
           << stop_cause_name(run.cause) << "," << (run.steps.empty() ? 0 : run.steps.back().step)
           << "," << run.zoom_ins << "," << run.zoom_outs << "," << run.refinements << ","
           << run.total_transmissions() << "," << run.total_mm_messages() << ","
           << run.total_vote_messages() << "," << total_bits.str() << ","
           << detail::fmt_g17(steps == 0 ? 0.0
                                         : static_cast<double>(run.total_transmissions()) /
                                               static_cast<double>(steps))
           << "\n";

    artifacts.run = std::move(run);
    all.push_back(std::move(artifacts));
  }

  // Aggregate curve: mean error over the trials still running at each step.
  std::size_t longest = 0;
  for (const auto& a : all) longest = std::max(longest, a.errors.size());
  std::ofstream agg(fs::path(cfg.out_dir) / "aggregate.csv");
  agg << "step,mean_e,n_active\n";
  for (std::size_t k = 0; k < longest; ++k) {
    double sum = 0.0;
    int active = 0;
    for (const auto& a : all) {
      if (k < a.errors.size()) {
        sum += a.errors[k];
        ++active;
      }
    }
    agg << k << "," << detail::fmt_g17(sum / active) << "," << active << "\n";
  }

  return all;
}

struct VerifyReport {
  long trials = 0;
  long steps_checked = 0;
  long envelope_violations = 0;
  long band_violations = 0;
  long band_skipped = 0;  // clamped payloads: outside the band's validity
  std::vector<std::string> messages;

  bool clean() const { return envelope_violations == 0 && band_violations == 0; }
};

/// Re-checks the contraction envelope and the 2*delta consensus band from a
/// run directory. Estimates come back through doubles, so comparisons carry a
/// small absolute slack; the exact in-process checks live with the optimizer.
inline VerifyReport verify_bounds_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path meta_path = fs::path(dir) / "meta.csv";
  std::ifstream meta(meta_path);
  if (!meta) throw MissingTrajectory("missing meta.csv under '" + dir + "'");

  VerifyReport report;
  const Rational tol(1, 1000000000);  // absorbs double round-trips in the CSVs

  std::string line;
  std::getline(meta, line);  // header
  std::map<std::string, std::size_t> meta_cols;
  {
    const auto names = detail::split_csv_line(line);
    for (std::size_t i = 0; i < names.size(); ++i) meta_cols[names[i]] = i;
  }
  while (std::getline(meta, line)) {
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    const std::string trial = fields[meta_cols.at("trial")];
    const int n = std::stoi(fields[meta_cols.at("n")]);
    const Rational alpha = parse_rational(fields[meta_cols.at("alpha_exact")]);
    const Rational mu = parse_rational(fields[meta_cols.at("mu_exact")]);
    const Rational lipschitz = parse_rational(fields[meta_cols.at("L_exact")]);
    const Rational x_star = parse_rational(fields[meta_cols.at("x_star_exact")]);

    const fs::path trial_path = fs::path(dir) / ("trial_" + trial + ".csv");
    std::ifstream trial_in(trial_path);
    if (!trial_in) throw MissingTrajectory("missing trajectory file '" + trial_path.string() + "'");
    ++report.trials;

    std::string row;
    std::getline(trial_in, row);
    std::map<std::string, std::size_t> cols;
    {
      const auto names = detail::split_csv_line(row);
      for (std::size_t i = 0; i < names.size(); ++i) cols[names[i]] = i;
    }
    bool have_prev = false;
    Rational x_prev;
    while (std::getline(trial_in, row)) {
      if (row.empty()) continue;
      const auto f = detail::split_csv_line(row);
      const long step = std::stol(f[cols.at("step")]);
      const Rational x_hat = rational_from_double(std::stod(f[cols.at("x_hat")]));
      if (step == 0) {
        x_prev = x_hat;
        have_prev = true;
        continue;
      }
      if (!have_prev) throw MissingTrajectory("trajectory misses its step-0 row: " + trial_path.string());
      const Rational z_hat = rational_from_double(std::stod(f[cols.at("z_hat")]));
      const Rational delta = parse_rational(f[cols.at("delta_exact")]);
      const int clamped = std::stoi(f[cols.at("clamped")]);
      ++report.steps_checked;

      const Rational lhs = abs_rational(x_hat - x_star);
      const Rational rhs = contraction_rate(alpha, mu, n) * abs_rational(x_prev - x_star) +
                           envelope_term(alpha, lipschitz, n, delta);
      if (lhs > rhs + tol) {
        ++report.envelope_violations;
        report.messages.push_back("trial " + trial + " step " + std::to_string(step) +
                                  ": contraction envelope violated");
      }
      if (clamped == 0) {
        if (abs_rational(x_hat - z_hat) > 2 * delta + tol) {
          ++report.band_violations;
          report.messages.push_back("trial " + trial + " step " + std::to_string(step) +
                                    ": |x_hat - z_hat| exceeds 2*delta");
        }
      } else {
        ++report.band_skipped;
      }
      x_prev = x_hat;
    }
  }
  return report;
}

struct Table2Row {
  std::string algorithm;
  double threshold = 0.0;
  bool reached = false;
  long convergence_step = 0;   // c_s
  int bits_per_message = 0;    // b_pm at that step
  Rational avg_transmissions;  // n_tt averaged over every consensus invocation
  Rational total_bits;         // c_s * b_pm * avg n_tt
};

/// Builds total-communication rows b_t = c_s * b_pm * n_tt from a run
/// directory, one row per error threshold the aggregate curve reaches.
inline std::vector<Table2Row> table2_from_dir(const std::string& dir,
                                              const std::vector<double>& thresholds) {
  namespace fs = std::filesystem;
  std::ifstream agg(fs::path(dir) / "aggregate.csv");
  if (!agg) throw MissingTrajectory("missing aggregate.csv under '" + dir + "'");
  std::string line;
  std::getline(agg, line);
  std::vector<std::pair<long, double>> curve;
  while (std::getline(agg, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    curve.emplace_back(std::stol(f[0]), std::stod(f[1]));
  }

  std::string algorithm = "?";
  {
    std::ifstream meta(fs::path(dir) / "meta.csv");
    if (!meta) throw MissingTrajectory("missing meta.csv under '" + dir + "'");
    std::getline(meta, line);
    const auto header = detail::split_csv_line(line);
    std::size_t alg_col = 0;
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == "algorithm") alg_col = i;
    if (std::getline(meta, line) && !line.empty()) algorithm = detail::split_csv_line(line)[alg_col];
  }

  // Per-step message widths (trial 0) and the network-wide average number of
  // transmissions per consensus invocation (all trials, all steps).
  std::map<long, int> width_by_step;
  long long total_tt = 0, invocations = 0;
  for (long t = 0;; ++t) {
    std::ifstream trial_in(fs::path(dir) / ("trial_" + std::to_string(t) + ".csv"));
    if (!trial_in) break;
    std::getline(trial_in, line);
    std::map<std::string, std::size_t> cols;
    {
      const auto names = detail::split_csv_line(line);
      for (std::size_t i = 0; i < names.size(); ++i) cols[names[i]] = i;
    }
    while (std::getline(trial_in, line)) {
      if (line.empty()) continue;
      const auto f = detail::split_csv_line(line);
      const long step = std::stol(f[cols.at("step")]);
      if (step == 0) continue;
      if (t == 0) width_by_step[step] = std::stoi(f[cols.at("b_pm")]);
      total_tt += std::stoll(f[cols.at("n_tt_step")]);
      ++invocations;
    }
  }
  if (invocations == 0) throw MissingTrajectory("no trajectory rows under '" + dir + "'");
  const Rational avg_tt{Int(total_tt), Int(invocations)};

  std::vector<Table2Row> rows;
  for (double threshold : thresholds) {
    Table2Row row;
    row.algorithm = algorithm;
    row.threshold = threshold;
    row.avg_transmissions = avg_tt;
    for (const auto& [step, e] : curve) {
      if (step >= 1 && e <= threshold) {
        row.reached = true;
        row.convergence_step = step;
        const auto it = width_by_step.find(step);
        row.bits_per_message = it == width_by_step.end() ? 0 : it->second;
        break;
      }
    }
    if (row.reached)
      row.total_bits = table2_row(Rational(row.convergence_step), Rational(row.bits_per_message), avg_tt);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace qcopt
