// Command-line front end: `simulate` runs a configured experiment and writes
// the CSV contract into an output directory, `verify` re-checks the recorded
// trajectories against the convergence bounds, and `table2` condenses a run
// directory into total-communication rows.
//
// Exit codes: 0 success, 1 configuration error, 2 bound violation,
// 3 I/O error.

#include <CLI11.hpp>

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "qcopt/qcopt.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitBoundViolation = 2;
constexpr int kExitIo = 3;

int run_simulate(const std::string& config_path, const std::string& algorithm,
                 const std::string& seed_list, const std::string& out_dir, bool trace,
                 const std::vector<std::string>& overrides) {
  qcopt::KvConfig kv = qcopt::KvConfig::parse_file(config_path);
  for (const auto& assignment : overrides) kv.set_override(assignment);
  if (!algorithm.empty()) kv.set("optimizer.algorithm", algorithm);
  if (!seed_list.empty()) kv.set("run.seeds", seed_list);
  if (!out_dir.empty()) kv.set("run.out", out_dir);
  if (trace) kv.set("run.trace", "true");

  const qcopt::ExperimentConfig cfg = qcopt::experiment_from_kv(kv);
  qcopt::log_info("running " + std::to_string(cfg.seeds.size()) + " trial(s) of " +
                  qcopt::algorithm_name(cfg.algorithm) + " into " + cfg.out_dir);
  const auto trials = qcopt::run_experiment(cfg);
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const auto& run = trials[t].run;
    qcopt::log_info("trial " + std::to_string(t) + ": " + std::to_string(run.steps.size()) +
                    " steps, cause=" + qcopt::stop_cause_name(run.cause));
  }
  std::cout << "wrote " << trials.size() << " trial(s) to " << cfg.out_dir << "\n";
  return kExitOk;
}

int run_verify(const std::string& in_dir) {
  const qcopt::VerifyReport report = qcopt::verify_bounds_dir(in_dir);
  std::cout << report.steps_checked << " steps checked across " << report.trials
            << " trial(s)\n";
  std::cout << "contraction envelope violations: " << report.envelope_violations << "\n";
  std::cout << "consensus band violations: " << report.band_violations << " ("
            << report.band_skipped << " clamped steps outside the band's validity)\n";
  for (const auto& msg : report.messages) std::cout << "  " << msg << "\n";
  return report.clean() ? kExitOk : kExitBoundViolation;
}

int run_table2(const std::string& in_dir, const std::vector<double>& thresholds) {
  const auto rows = qcopt::table2_from_dir(in_dir, thresholds);
  std::ofstream csv(std::filesystem::path(in_dir) / "table2.csv");
  csv << "algorithm,threshold,c_s,b_pm,avg_n_tt,total_bits\n";
  std::cout << "algorithm  threshold    c_s  b_pm  avg_n_tt      total_bits\n";
  for (const auto& row : rows) {
    if (!row.reached) {
      std::cout << row.algorithm << "  " << row.threshold << "  --\n";
      csv << row.algorithm << "," << row.threshold << ",--,--,--,--\n";
      continue;
    }
    const double bits = qcopt::to_double(row.total_bits);
    std::cout << row.algorithm << "  " << row.threshold << "  " << row.convergence_step << "  "
              << row.bits_per_message << "  " << qcopt::to_double(row.avg_transmissions) << "  "
              << bits << "\n";
    csv << row.algorithm << "," << row.threshold << "," << row.convergence_step << ","
        << row.bits_per_message << "," << qcopt::to_double(row.avg_transmissions) << "," << bits
        << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantized-communication distributed optimization simulator"};
  app.require_subcommand(1);

  std::string config_path, algorithm, seed_list, out_dir, in_dir;
  bool trace = false;
  std::vector<std::string> overrides;
  std::vector<double> thresholds{1e-2, 1e-3, 1e-5};

  auto* simulate = app.add_subcommand("simulate", "run a configured experiment");
  simulate->add_option("--config", config_path, "experiment config file")->required();
  simulate->add_option("--algorithm", algorithm, "override: alg1|alg3|alg4");
  simulate->add_option("--seed-list", seed_list, "override: seeds, e.g. 0:19 or 1,2,3");
  simulate->add_option("--out", out_dir, "override: output directory");
  simulate->add_flag("--trace", trace, "write per-round consensus traces");
  simulate->add_option("--set", overrides, "config override section.key=value");

  auto* verify = app.add_subcommand("verify", "re-check recorded bounds");
  verify->add_option("--in", in_dir, "run directory")->required();

  auto* table2 = app.add_subcommand("table2", "total-communication summary");
  table2->add_option("--in", in_dir, "run directory")->required();
  table2->add_option("--thresholds", thresholds, "error thresholds");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(config_path, algorithm, seed_list, out_dir, trace, overrides);
    if (verify->parsed()) return run_verify(in_dir);
    if (table2->parsed()) return run_table2(in_dir, thresholds);
  } catch (const qcopt::MissingTrajectory& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const qcopt::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qcopt::StepSizeTooLarge& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qcopt::NotStronglyConnected& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qcopt::ProtocolViolation& e) {
    std::cerr << "protocol invariant violated: " << e.what() << "\n";
    return kExitBoundViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
