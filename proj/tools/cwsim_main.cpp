// Command-line front end for the contention-window simulator.
//
// Subcommands:
//   run <config>      execute an experiment config file
//   sweep             build a one-off experiment from flags
//   compare           percent-change table against a baseline algorithm
//   scenario <name>   run a named config from the scenario directory
//   trace             dump one simulated trial window-by-window
//
// Exit codes: 0 success, 1 config/usage error, 2 experiment had failed
// cells, 3 internal error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cwsim/cwsim.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitFailedCells = 2;
constexpr int kExitInternal = 3;

std::string scenario_dir() {
  if (const char* env = std::getenv("CWSIM_SCENARIO_DIR")) return env;
  return "scenarios";
}

// Writes text to `out` (or stdout when empty).  Returns false on I/O failure.
bool write_output(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return bool(std::cout);
  }
  std::ofstream f(out, std::ios::binary);
  f << text;
  return bool(f);
}

int run_table(const cwsim::ExperimentConfig& cfg, unsigned threads,
              const std::string& out) {
  cwsim::RunnerOptions opt;
  opt.threads = threads;
  cwsim::ExperimentTable table = cwsim::run_experiment(cfg, opt);
  std::ostringstream os;
  cwsim::write_csv(table, os);
  if (!write_output(os.str(), out)) {
    std::cerr << "error: cannot write output file '" << out << "'\n";
    return kExitInternal;
  }
  for (const cwsim::FailedCell& f : table.failed)
    std::cerr << "warning: cell " << f.algorithm << " n=" << f.n
              << " failed: " << f.reason << "\n";
  return table.failed.empty() ? kExitOk : kExitFailedCells;
}

int cmd_run(const std::string& path, bool full_scale, unsigned threads,
            const std::string& out) {
  cwsim::ExperimentConfig cfg = cwsim::ExperimentConfig::parse_file(path);
  if (full_scale) cfg.apply_full_scale();
  return run_table(cfg, threads, out);
}

int cmd_scenario(const std::string& name, bool list, bool full_scale,
                 unsigned threads, const std::string& out) {
  fs::path dir = scenario_dir();
  if (list) {
    if (!fs::is_directory(dir)) {
      std::cerr << "error: scenario directory '" << dir.string()
                << "' not found (set CWSIM_SCENARIO_DIR)\n";
      return kExitConfig;
    }
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.path().extension() == ".cfg")
        names.push_back(entry.path().stem().string());
    std::sort(names.begin(), names.end());
    for (const std::string& n : names) std::cout << n << "\n";
    return kExitOk;
  }
  fs::path path = name;
  if (!fs::is_regular_file(path)) path = dir / (name + ".cfg");
  if (!fs::is_regular_file(path)) {
    std::cerr << "error: unknown scenario '" << name << "' (looked for "
              << path.string() << "; try --list)\n";
    return kExitConfig;
  }
  return cmd_run(path.string(), full_scale, threads, out);
}

int cmd_compare(const std::string& baseline, const std::string& results,
                const std::string& out) {
  std::ifstream in(results, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open results file '" << results << "'\n";
    return kExitConfig;
  }
  cwsim::CsvReadResult table = cwsim::read_summary_csv(in);
  for (const std::string& w : table.warnings)
    std::cerr << "warning: " << w << "\n";
  cwsim::ComparisonResult cmp =
      cwsim::compare_to_baseline(table.rows, baseline);
  for (const std::string& w : cmp.warnings)
    std::cerr << "warning: " << w << "\n";
  std::ostringstream os;
  cwsim::write_comparison_csv(cmp, os);
  if (!write_output(os.str(), out)) {
    std::cerr << "error: cannot write output file '" << out << "'\n";
    return kExitInternal;
  }
  return kExitOk;
}

int cmd_trace(const std::string& alg, uint32_t n, uint64_t seed, bool truncate,
              uint64_t safety_cap, const std::string& out) {
  cwsim::BackoffPolicy policy = cwsim::BackoffPolicy::parse(alg);
  cwsim::EngineOptions opt;
  opt.truncate_at_last_success = truncate;
  opt.safety_cap = safety_cap;
  try {
    cwsim::TrialTrace t = cwsim::run_trial(policy, n, seed, opt);
    std::ostringstream os;
    cwsim::dump_trace(t, os);
    os << "# cw_slots=" << t.cw_slots_total
       << " collisions=" << t.collision_slots_total
       << " half_done_slot=" << t.half_done_slot << " alo=" << t.alo_instances
       << "\n";
    if (!write_output(os.str(), out)) {
      std::cerr << "error: cannot write output file '" << out << "'\n";
      return kExitInternal;
    }
  } catch (const cwsim::safety_cap_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailedCells;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contention-window backoff simulator"};
  app.require_subcommand(1);

  // --- run ---
  std::string run_config, run_out;
  bool run_full = false;
  unsigned run_threads = 1;
  CLI::App* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("config", run_config, "config file path")->required();
  run->add_option("--out", run_out, "output CSV path (default stdout)");
  run->add_option("--threads", run_threads, "worker pool size");
  run->add_flag("--full-scale", run_full,
                "apply the config's full-scale overrides");

  // --- sweep ---
  std::vector<std::string> sweep_algs;
  std::string sweep_n, sweep_out, sweep_model = "classic", sweep_profile;
  std::vector<std::string> sweep_metrics;
  uint32_t sweep_trials = 25;
  uint64_t sweep_seed = 0;
  uint64_t sweep_cap = uint64_t(1) << 32;
  bool sweep_truncate = false;
  unsigned sweep_threads = 1;
  CLI::App* sweep =
      app.add_subcommand("sweep", "run an experiment built from flags");
  sweep->add_option("--alg", sweep_algs,
                    "algorithms (repeatable; ';'-separated, or ','-separated "
                    "when no descriptor uses ':' parameters)")
      ->required();
  sweep->add_option("--n", sweep_n, "batch sizes, e.g. 10:150:10 or 16,64")
      ->required();
  sweep->add_option("--trials", sweep_trials, "trials per cell");
  sweep->add_option("--metric", sweep_metrics,
                    "metrics (repeatable or comma-separated); default "
                    "cw_slots");
  sweep->add_option("--seed", sweep_seed, "master seed");
  sweep->add_option("--model", sweep_model,
                    "cost model: classic, log2n, or a number >= 1");
  sweep->add_option("--profile", sweep_profile,
                    "timing profile (80211g-default or 80211g-compat)");
  sweep->add_flag("--truncate", sweep_truncate,
                  "count CW slots only up to the last success");
  sweep->add_option("--safety-cap", sweep_cap,
                    "abort any trial beyond this many CW slots");
  sweep->add_option("--out", sweep_out, "output CSV path (default stdout)");
  sweep->add_option("--threads", sweep_threads, "worker pool size");

  // --- compare ---
  std::string cmp_baseline, cmp_results, cmp_out;
  CLI::App* cmp = app.add_subcommand(
      "compare", "percent change of each algorithm vs a baseline");
  cmp->add_option("--baseline", cmp_baseline, "baseline algorithm label")
      ->required();
  cmp->add_option("results", cmp_results, "summary CSV from run/sweep")
      ->required();
  cmp->add_option("--out", cmp_out, "output CSV path (default stdout)");

  // --- scenario ---
  std::string sc_name, sc_out;
  bool sc_list = false, sc_full = false;
  unsigned sc_threads = 1;
  CLI::App* sc = app.add_subcommand("scenario", "run a named scenario config");
  sc->add_option("name", sc_name, "scenario name or config path");
  sc->add_flag("--list", sc_list, "list available scenarios");
  sc->add_option("--out", sc_out, "output CSV path (default stdout)");
  sc->add_option("--threads", sc_threads, "worker pool size");
  sc->add_flag("--full-scale", sc_full,
               "apply the scenario's full-scale overrides");

  // --- trace ---
  std::string tr_alg = "beb", tr_out;
  uint32_t tr_n = 0;
  uint64_t tr_seed = 0;
  uint64_t tr_cap = uint64_t(1) << 32;
  bool tr_truncate = false;
  CLI::App* tr =
      app.add_subcommand("trace", "dump one trial's windows, tab-separated");
  tr->add_option("--alg", tr_alg, "policy descriptor");
  tr->add_option("--n", tr_n, "number of stations")->required();
  tr->add_option("--seed", tr_seed, "trial seed");
  tr->add_flag("--truncate", tr_truncate,
               "count CW slots only up to the last success");
  tr->add_option("--safety-cap", tr_cap,
                 "abort the trial beyond this many CW slots");
  tr->add_option("--out", tr_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed())
      return cmd_run(run_config, run_full, run_threads, run_out);

    if (sweep->parsed()) {
      cwsim::ExperimentConfig cfg;
      for (const std::string& spec : sweep_algs)
        for (const std::string& a : cwsim::detail::parse_algorithm_list(spec))
          cfg.algorithms.push_back(a);
      cfg.n_grid = cwsim::detail::parse_n_grid(sweep_n);
      cfg.trials = sweep_trials;
      cfg.master_seed = sweep_seed;
      cfg.cost_model = sweep_model;
      if (!sweep_profile.empty()) cfg.timing_profile = sweep_profile;
      if (sweep_metrics.empty()) {
        cfg.metrics = {cwsim::Metric::cw_slots};
      } else {
        for (const std::string& group : sweep_metrics)
          for (std::string_view m : cwsim::detail::split(group, ','))
            cfg.metrics.push_back(cwsim::parse_metric(m));
      }
      cfg.truncate_at_last_success = sweep_truncate;
      cfg.safety_cap = sweep_cap;
      cfg.validate();
      return run_table(cfg, sweep_threads, sweep_out);
    }

    if (cmp->parsed()) return cmd_compare(cmp_baseline, cmp_results, cmp_out);

    if (sc->parsed()) {
      if (!sc_list && sc_name.empty()) {
        std::cerr << "error: scenario needs a name or --list\n";
        return kExitConfig;
      }
      return cmd_scenario(sc_name, sc_list, sc_full, sc_threads, sc_out);
    }

    if (tr->parsed())
      return cmd_trace(tr_alg, tr_n, tr_seed, tr_truncate, tr_cap, tr_out);

    std::cerr << "error: no subcommand\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
