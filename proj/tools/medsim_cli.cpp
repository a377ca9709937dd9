// medsim: run, re-analyse or check a policy sweep.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "medsim/medsim.hpp"

namespace {

struct Options {
  std::string config_path;
  medsim::ConfigOverrides overrides;
  std::string out_dir = "medsim_out";
  std::string format = "csv";
  std::size_t workers = 0;
  std::string trials_path;
};

void add_sweep_flags(CLI::App& cmd, Options& o) {
  cmd.add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
  cmd.add_option("--seed", o.overrides.master_seed, "master seed");
  cmd.add_option("--trials", o.overrides.trials, "trials per condition");
  cmd.add_option("--degradation", o.overrides.degradation_levels, "degradation levels in [0, 1]")
      ->delimiter(',');
  cmd.add_option("--loads", o.overrides.patient_loads, "patient loads")->delimiter(',');
  cmd.add_option("--policies", o.overrides.policies, "policy subset (pi1_teleop, pi2_auto, pi3_geodt)")
      ->delimiter(',');
  cmd.add_option("--tau-c", o.overrides.tau_c, "acceptable intervention window, min");
  cmd.add_option("--alpha", o.overrides.alpha, "workload weight on task switches");
  cmd.add_option("--beta", o.overrides.beta, "workload weight on interventions");
  cmd.add_option("--w-s", o.overrides.w_s, "triage severity weight");
  cmd.add_option("--w-u", o.overrides.w_u, "triage urgency weight");
  cmd.add_option("--w-a", o.overrides.w_a, "triage accessibility weight");
  cmd.add_option("--delta0", o.overrides.delta0, "triage urgency scale, min");
}

medsim::SweepConfig load_config(const Options& o) {
  std::optional<medsim::json> file;
  if (!o.config_path.empty()) file = medsim::read_json_file(o.config_path);
  return medsim::parse_config(o.overrides, file);
}

void log_cells(const medsim::SweepResult& r) {
  for (const auto& s : r.summaries) {
    std::fprintf(stderr, "cell delta=%.2f load=%zu %-9s n=%zu T_int=%.1f rho=%.3f R_fail=%.3f W=%.3f\n", s.delta,
                 s.load, std::string(medsim::to_string(s.policy)).c_str(), s.trials, s.vector.T_int_mean,
                 s.vector.rho, s.vector.R_fail, s.vector.W_mean);
  }
}

void print_rollup(const medsim::SweepResult& r) {
  for (const auto& p : r.rollup) {
    std::printf("%-9s trials=%zu T_int=%.1f rho=%.3f R_fail=%.4f W=%.3f mission_time=%.1f\n",
                std::string(medsim::to_string(p.policy)).c_str(), p.trials, p.vector.T_int_mean, p.vector.rho,
                p.vector.R_fail, p.vector.W_mean, p.mission_time);
  }
}

int cmd_run(const Options& o) {
  const auto format = medsim::parse_format(o.format);
  const auto cfg = load_config(o);
  std::fprintf(stderr, "running %zu missions\n", cfg.total_missions());
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = medsim::run_sweep(cfg, o.workers);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  log_cells(result);
  const auto files = medsim::emit_reports(result, format, o.out_dir, {cfg, wall});
  print_rollup(result);
  std::printf("wrote %s (%.2f s)\n", files.manifest.parent_path().string().c_str(), wall);
  return 0;
}

int cmd_report(const Options& o) {
  const auto format = medsim::parse_format(o.format);
  auto trials = medsim::read_trials_file(o.trials_path);
  if (trials.empty()) throw medsim::IoError("trials file has no rows");
  const auto result = medsim::analyze(std::move(trials));
  log_cells(result);
  medsim::emit_reports(result, format, o.out_dir);
  print_rollup(result);
  return 0;
}

int cmd_validate(const Options& o) {
  const auto cfg = load_config(o);
  std::printf("config ok: %zu conditions, %zu policies, %zu missions\n", cfg.condition_count(),
              cfg.policies.size(), cfg.total_missions());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo comparison of teleoperated, heuristic and triage-aware response policies"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "run the sweep and write reports");
  add_sweep_flags(*run, o);
  run->add_option("--out", o.out_dir, "output directory");
  run->add_option("--format", o.format, "csv or json");
  run->add_option("--workers", o.workers, "worker threads (0 = all cores)");

  auto* report = app.add_subcommand("report", "recompute summaries from a trials file");
  report->add_option("trials", o.trials_path, "trials.csv or trials.json")->required()->check(CLI::ExistingFile);
  report->add_option("--out", o.out_dir, "output directory");
  report->add_option("--format", o.format, "csv or json");

  auto* check = app.add_subcommand("validate", "check a configuration and exit");
  add_sweep_flags(*check, o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(o);
    if (report->parsed()) return cmd_report(o);
    return cmd_validate(o);
  } catch (const medsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
