#pragma once
#include <atomic>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "cwsim/cost.hpp"
#include "cwsim/engine.hpp"
#include "cwsim/policy.hpp"
#include "cwsim/rng.hpp"
#include "cwsim/stats.hpp"
#include "cwsim/timing.hpp"

namespace cwsim {

// Experiment orchestration: sweeps over (algorithm, n) cells, runs seeded
// trials through the engine, aggregates each cell with the stats module, and
// serializes results as CSV.  Re-running a config yields byte-identical
// output regardless of worker-pool size: every trial's seed is a pure
// function of (master_seed, algorithm index, n index, trial index).

enum class Metric {
  cw_slots,
  collisions,
  makespan,
  exec_time_us,
  half_done_slot,
  alo,
  max_station_collisions,
};

inline const char* to_string(Metric m) {
  switch (m) {
    case Metric::cw_slots: return "cw_slots";
    case Metric::collisions: return "collisions";
    case Metric::makespan: return "makespan";
    case Metric::exec_time_us: return "exec_time_us";
    case Metric::half_done_slot: return "half_done_slot";
    case Metric::alo: return "alo";
    case Metric::max_station_collisions: return "max_station_collisions";
  }
  throw std::logic_error("unknown metric");
}

inline Metric parse_metric(std::string_view name) {
  if (name == "cw_slots") return Metric::cw_slots;
  if (name == "collisions") return Metric::collisions;
  if (name == "makespan") return Metric::makespan;
  if (name == "exec_time_us") return Metric::exec_time_us;
  if (name == "half_done_slot") return Metric::half_done_slot;
  if (name == "alo") return Metric::alo;
  if (name == "max_station_collisions") return Metric::max_station_collisions;
  throw std::invalid_argument(
      "unknown metric '" + std::string(name) +
      "' (expected cw_slots, collisions, makespan, exec_time_us, "
      "half_done_slot, alo, max_station_collisions)");
}

struct ExperimentConfig {
  std::vector<std::string> algorithms;  // policy descriptors, label-verbatim
  std::vector<uint32_t> n_grid;
  uint32_t trials = 1;
  std::string cost_model = "classic";
  std::optional<std::string> timing_profile;
  uint64_t master_seed = 0;
  std::vector<Metric> metrics;
  bool truncate_at_last_success = false;
  uint64_t safety_cap = uint64_t(1) << 32;
  // Optional full-scale overrides, applied by apply_full_scale().
  std::optional<std::vector<uint32_t>> n_grid_full;
  std::optional<uint32_t> trials_full;

  void validate() const {
    if (algorithms.empty())
      throw std::invalid_argument("config needs at least one algorithm");
    for (const std::string& a : algorithms) BackoffPolicy::parse(a);
    if (n_grid.empty())
      throw std::invalid_argument("config needs a non-empty n_grid");
    for (size_t i = 0; i < n_grid.size(); ++i) {
      if (n_grid[i] == 0)
        throw std::invalid_argument("batch sizes must be positive");
      if (i > 0 && n_grid[i] <= n_grid[i - 1])
        throw std::invalid_argument("n_grid must be strictly increasing");
    }
    if (trials == 0) throw std::invalid_argument("trials must be >= 1");
    if (metrics.empty())
      throw std::invalid_argument("config needs at least one metric");
    CostModel::parse(cost_model);
    if (timing_profile) timing_profile_params();
    for (Metric m : metrics) {
      if (m == Metric::exec_time_us && !timing_profile)
        throw std::invalid_argument(
            "metric exec_time_us needs a timing_profile");
    }
    if (safety_cap == 0)
      throw std::invalid_argument("safety cap must be positive");
  }

  TimingParams timing_profile_params() const {
    if (!timing_profile)
      throw std::invalid_argument("no timing profile configured");
    return cwsim::timing_profile(*timing_profile);
  }

  void apply_full_scale() {
    if (n_grid_full) n_grid = *n_grid_full;
    if (trials_full) trials = *trials_full;
  }

  static ExperimentConfig parse_text(std::string_view text);
  static ExperimentConfig parse_file(const std::string& path);
};

// --- config file grammar ------------------------------------------------
//
// Line-oriented "key = value"; blank lines and lines starting with '#' are
// ignored.  Keys: algorithms, n_grid, trials, cost_model, timing_profile,
// master_seed, metrics, truncate_at_last_success, safety_cap, n_grid_full,
// trials_full.
//
// List values: algorithm lists split on ';' (or on ',' when no item uses
// ':' parameters, so "beb,llb" works); n_grid entries are integers or
// inclusive a:b:step ranges, comma-separated; metrics are comma-separated.

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (start <= s.size()) {
    size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(s.substr(start)));
      break;
    }
    out.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

inline uint64_t parse_seed(std::string_view v) {
  std::string tmp(trim(v));
  if (tmp.empty()) throw std::invalid_argument("empty seed");
  try {
    size_t used = 0;
    uint64_t out = std::stoull(tmp, &used, 0);  // base 0: decimal or 0x...
    if (used != tmp.size()) throw std::invalid_argument("trailing junk");
    return out;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad seed '" + tmp + "'");
  }
}

inline std::vector<std::string> parse_algorithm_list(std::string_view v) {
  std::vector<std::string_view> items;
  if (v.find(';') != std::string_view::npos)
    items = split(v, ';');
  else if (v.find(':') == std::string_view::npos)
    items = split(v, ',');
  else
    items = {trim(v)};
  std::vector<std::string> out;
  for (std::string_view item : items) {
    if (item.empty())
      throw std::invalid_argument("empty entry in algorithm list");
    out.emplace_back(item);
  }
  return out;
}

inline std::vector<uint32_t> parse_n_grid(std::string_view v) {
  std::vector<uint32_t> out;
  for (std::string_view item : split(v, ',')) {
    if (item.empty())
      throw std::invalid_argument("empty entry in n_grid");
    auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(uint32_t(parse_u64(parts[0], "n_grid")));
    } else if (parts.size() == 3) {
      uint64_t lo = parse_u64(parts[0], "n_grid range start");
      uint64_t hi = parse_u64(parts[1], "n_grid range end");
      uint64_t step = parse_u64(parts[2], "n_grid range step");
      if (step == 0) throw std::invalid_argument("n_grid range step is zero");
      if (lo > hi)
        throw std::invalid_argument("n_grid range start exceeds end");
      for (uint64_t n = lo; n <= hi; n += step) out.push_back(uint32_t(n));
    } else {
      throw std::invalid_argument("bad n_grid entry '" + std::string(item) +
                                  "' (expected N or start:end:step)");
    }
  }
  return out;
}

inline bool parse_bool(std::string_view v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw std::invalid_argument("bad boolean '" + std::string(v) + "'");
}

}  // namespace detail

inline ExperimentConfig ExperimentConfig::parse_text(std::string_view text) {
  ExperimentConfig cfg;
  std::vector<std::string> seen;
  size_t lineno = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    std::string_view line = nl == std::string_view::npos
                                ? text.substr(start)
                                : text.substr(start, nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    lineno++;

    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    std::string key{detail::trim(line.substr(0, eq))};
    std::string_view val = detail::trim(line.substr(eq + 1));
    for (const std::string& s : seen)
      if (s == key)
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": duplicate key '" + key + "'");
    seen.push_back(key);

    try {
      if (key == "algorithms") {
        cfg.algorithms = detail::parse_algorithm_list(val);
      } else if (key == "n_grid") {
        cfg.n_grid = detail::parse_n_grid(val);
      } else if (key == "n_grid_full") {
        cfg.n_grid_full = detail::parse_n_grid(val);
      } else if (key == "trials") {
        cfg.trials = uint32_t(detail::parse_u64(val, "trials"));
      } else if (key == "trials_full") {
        cfg.trials_full = uint32_t(detail::parse_u64(val, "trials_full"));
      } else if (key == "cost_model") {
        cfg.cost_model = std::string(val);
      } else if (key == "timing_profile") {
        cfg.timing_profile = std::string(val);
      } else if (key == "master_seed") {
        cfg.master_seed = detail::parse_seed(val);
      } else if (key == "metrics") {
        cfg.metrics.clear();
        for (std::string_view m : detail::split(val, ','))
          cfg.metrics.push_back(parse_metric(m));
      } else if (key == "truncate_at_last_success") {
        cfg.truncate_at_last_success = detail::parse_bool(val);
      } else if (key == "safety_cap") {
        cfg.safety_cap = detail::parse_u64(val, "safety_cap");
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::invalid_argument("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

// --- runner ---------------------------------------------------------------

struct FailedCell {
  std::string algorithm;
  uint32_t n = 0;
  std::string reason;
};

struct ExperimentTable {
  std::vector<SummaryRow> rows;    // ordered by (algorithm index, n, metric)
  std::vector<FailedCell> failed;  // cells that hit the safety cap
};

struct RunnerOptions {
  unsigned threads = 1;
};

namespace detail {

struct TrialNumbers {
  uint64_t cw_slots = 0;
  uint64_t collision_slots = 0;
  uint64_t half_done_slot = 0;
  uint64_t alo_instances = 0;
  uint32_t max_station_collisions = 0;
};

inline double metric_value(Metric m, const TrialNumbers& t, uint32_t n,
                           const CostModel& model,
                           const std::optional<TimingParams>& timing) {
  switch (m) {
    case Metric::cw_slots: return double(t.cw_slots);
    case Metric::collisions: return double(t.collision_slots);
    case Metric::makespan:
      return makespan(t.cw_slots, t.collision_slots, model, n);
    case Metric::exec_time_us:
      return double(execution_time_us(t.cw_slots, t.collision_slots,
                                      uint64_t(n), *timing));
    case Metric::half_done_slot: return double(t.half_done_slot);
    case Metric::alo: return double(t.alo_instances);
    case Metric::max_station_collisions:
      return double(t.max_station_collisions);
  }
  throw std::logic_error("unknown metric");
}

}  // namespace detail

inline ExperimentTable run_experiment(const ExperimentConfig& cfg,
                                      const RunnerOptions& opt = {}) {
  cfg.validate();
  const size_t n_algs = cfg.algorithms.size();
  const size_t n_sizes = cfg.n_grid.size();
  const size_t n_cells = n_algs * n_sizes;
  const size_t n_jobs = n_cells * cfg.trials;

  std::vector<BackoffPolicy> policies;
  policies.reserve(n_algs);
  for (const std::string& a : cfg.algorithms)
    policies.push_back(BackoffPolicy::parse(a));

  const CostModel model = CostModel::parse(cfg.cost_model);
  std::optional<TimingParams> timing;
  if (cfg.timing_profile) timing = cfg.timing_profile_params();

  bool want_station_log = false;
  for (Metric m : cfg.metrics)
    if (m == Metric::max_station_collisions) want_station_log = true;

  EngineOptions eng;
  eng.log_station_collisions = want_station_log;
  eng.truncate_at_last_success = cfg.truncate_at_last_success;
  eng.safety_cap = cfg.safety_cap;

  std::vector<std::vector<detail::TrialNumbers>> results(
      n_cells, std::vector<detail::TrialNumbers>(cfg.trials));
  std::vector<std::atomic<bool>> cell_failed(n_cells);
  for (auto& flag : cell_failed) flag.store(false);
  std::vector<std::string> fail_reason(n_cells);
  std::mutex fail_mu;

  std::atomic<size_t> next_job{0};
  std::atomic<bool> internal_error{false};
  std::string internal_message;
  std::mutex internal_mu;

  auto worker = [&]() {
    for (;;) {
      size_t j = next_job.fetch_add(1);
      if (j >= n_jobs || internal_error.load()) return;
      size_t cell = j / cfg.trials;
      uint32_t t = uint32_t(j % cfg.trials);
      uint32_t a_idx = uint32_t(cell / n_sizes);
      uint32_t n_idx = uint32_t(cell % n_sizes);
      uint64_t seed =
          mix64(cfg.master_seed, a_idx, n_idx, t, kTrialSeedTag);
      try {
        TrialTrace trace =
            run_trial(policies[a_idx], cfg.n_grid[n_idx], seed, eng);
        detail::TrialNumbers& out = results[cell][t];
        out.cw_slots = trace.cw_slots_total;
        out.collision_slots = trace.collision_slots_total;
        out.half_done_slot = trace.half_done_slot;
        out.alo_instances = trace.alo_instances;
        if (want_station_log)
          out.max_station_collisions = cwsim::max_station_collisions(trace);
      } catch (const safety_cap_error& e) {
        if (!cell_failed[cell].exchange(true)) {
          std::lock_guard<std::mutex> lock(fail_mu);
          fail_reason[cell] = e.what();
        }
      } catch (const std::exception& e) {
        if (!internal_error.exchange(true)) {
          std::lock_guard<std::mutex> lock(internal_mu);
          internal_message = e.what();
        }
        return;
      }
    }
  };

  unsigned pool = opt.threads == 0 ? 1 : opt.threads;
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (unsigned i = 0; i < pool; ++i) threads.emplace_back(worker);
    for (std::thread& th : threads) th.join();
  }
  if (internal_error.load())
    throw std::runtime_error("experiment worker failed: " + internal_message);

  // Deterministic aggregation, ordered (algorithm index, n, metric).
  ExperimentTable table;
  for (size_t a_idx = 0; a_idx < n_algs; ++a_idx) {
    for (size_t n_idx = 0; n_idx < n_sizes; ++n_idx) {
      size_t cell = a_idx * n_sizes + n_idx;
      uint32_t n = cfg.n_grid[n_idx];
      if (cell_failed[cell].load()) {
        table.failed.push_back(
            FailedCell{cfg.algorithms[a_idx], n, fail_reason[cell]});
        for (Metric m : cfg.metrics) {
          SummaryRow row;
          row.algorithm = cfg.algorithms[a_idx];
          row.n = n;
          row.metric = to_string(m);
          row.count = 0;
          row.median = row.ci_low = row.ci_high = row.mean =
              std::numeric_limits<double>::quiet_NaN();
          table.rows.push_back(std::move(row));
        }
        continue;
      }
      for (size_t m_idx = 0; m_idx < cfg.metrics.size(); ++m_idx) {
        Metric m = cfg.metrics[m_idx];
        std::vector<double> values;
        values.reserve(cfg.trials);
        for (uint32_t t = 0; t < cfg.trials; ++t)
          values.push_back(
              detail::metric_value(m, results[cell][t], n, model, timing));
        FilterResult filtered = iqr_filter(values);
        SummaryRow row;
        row.algorithm = cfg.algorithms[a_idx];
        row.n = n;
        row.metric = to_string(m);
        row.count = filtered.kept.size();
        row.outliers_removed = filtered.removed;
        double sum = 0;
        for (double v : filtered.kept) sum += v;
        row.mean = sum / double(filtered.kept.size());
        if (filtered.kept.size() >= 2) {
          uint64_t bseed = mix64(cfg.master_seed, uint32_t(a_idx),
                                 uint32_t(n_idx), uint32_t(m_idx),
                                 kBootstrapTag);
          MedianCI ci = median_ci(filtered.kept, 0.95, 10000, bseed);
          row.median = ci.median;
          row.ci_low = ci.ci_low;
          row.ci_high = ci.ci_high;
        } else {
          row.median = row.ci_low = row.ci_high = filtered.kept.at(0);
        }
        table.rows.push_back(std::move(row));
      }
    }
  }
  return table;
}

// --- CSV serialization ------------------------------------------------------

namespace detail {

inline std::string csv_escape(const std::string& s) {
  bool needs_quote = s.find_first_of(",\"\n") != std::string::npos;
  if (!needs_quote) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline constexpr const char* kSummaryHeader =
    "algorithm,n,metric,count,outliers_removed,median,ci_low,ci_high,mean";

inline void write_csv(const ExperimentTable& table, std::ostream& os) {
  os << kSummaryHeader << '\n';
  for (const SummaryRow& r : table.rows) {
    os << detail::csv_escape(r.algorithm) << ',' << r.n << ',' << r.metric
       << ',' << r.count << ',' << r.outliers_removed << ','
       << format_number(r.median) << ',' << format_number(r.ci_low) << ','
       << format_number(r.ci_high) << ',' << format_number(r.mean) << '\n';
  }
}

// Reads back a summary CSV produced by write_csv (used by `compare`).
// Unparseable or failed rows (count = 0) are skipped with a warning.
struct CsvReadResult {
  std::vector<SummaryRow> rows;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<std::string> csv_split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          i++;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace detail

inline CsvReadResult read_summary_csv(std::istream& in) {
  CsvReadResult out;
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("empty results file");
  if (detail::csv_split_line(line) !=
      detail::csv_split_line(kSummaryHeader))
    throw std::invalid_argument("unrecognized results header: " + line);
  size_t lineno = 1;
  while (std::getline(in, line)) {
    lineno++;
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> f = detail::csv_split_line(line);
    if (f.size() != 9) {
      out.warnings.push_back("line " + std::to_string(lineno) +
                             ": expected 9 fields, got " +
                             std::to_string(f.size()) + "; skipped");
      continue;
    }
    try {
      SummaryRow row;
      row.algorithm = f[0];
      row.n = uint32_t(detail::parse_u64(f[1], "n"));
      row.metric = f[2];
      row.count = detail::parse_u64(f[3], "count");
      row.outliers_removed = detail::parse_u64(f[4], "outliers_removed");
      row.median = f[5] == "nan" ? std::numeric_limits<double>::quiet_NaN()
                                 : std::stod(f[5]);
      row.ci_low = f[6] == "nan" ? std::numeric_limits<double>::quiet_NaN()
                                 : std::stod(f[6]);
      row.ci_high = f[7] == "nan" ? std::numeric_limits<double>::quiet_NaN()
                                  : std::stod(f[7]);
      row.mean = f[8] == "nan" ? std::numeric_limits<double>::quiet_NaN()
                               : std::stod(f[8]);
      if (row.count == 0 || std::isnan(row.median)) {
        out.warnings.push_back("line " + std::to_string(lineno) + ": cell " +
                               row.algorithm + "/n=" + std::to_string(row.n) +
                               " has no data (failed cell?); skipped");
        continue;
      }
      out.rows.push_back(std::move(row));
    } catch (const std::exception& e) {
      out.warnings.push_back("line " + std::to_string(lineno) + ": " +
                             e.what() + "; skipped");
    }
  }
  return out;
}

// --- baseline comparison ------------------------------------------------

struct ComparisonRow {
  std::string algorithm;
  uint32_t n = 0;
  std::string metric;
  double median = 0;
  double baseline_median = 0;
  double pct = 0;  // pct_change(median, baseline_median)
};

struct ComparisonResult {
  std::vector<ComparisonRow> rows;
  std::vector<std::string> warnings;
};

inline ComparisonResult compare_to_baseline(
    const std::vector<SummaryRow>& rows, const std::string& baseline) {
  bool baseline_seen = false;
  for (const SummaryRow& r : rows)
    if (r.algorithm == baseline) baseline_seen = true;
  if (!baseline_seen)
    throw std::invalid_argument("baseline algorithm '" + baseline +
                                "' not present in results");

  ComparisonResult out;
  for (const SummaryRow& r : rows) {
    const SummaryRow* base = nullptr;
    for (const SummaryRow& b : rows) {
      if (b.algorithm == baseline && b.n == r.n && b.metric == r.metric) {
        base = &b;
        break;
      }
    }
    if (!base) {
      out.warnings.push_back("no baseline cell for n=" + std::to_string(r.n) +
                             " metric=" + r.metric + "; skipped " +
                             r.algorithm);
      continue;
    }
    if (base->median == 0.0) {
      out.warnings.push_back("baseline median is 0 for n=" +
                             std::to_string(r.n) + " metric=" + r.metric +
                             "; percent change undefined, skipped " +
                             r.algorithm);
      continue;
    }
    ComparisonRow c;
    c.algorithm = r.algorithm;
    c.n = r.n;
    c.metric = r.metric;
    c.median = r.median;
    c.baseline_median = base->median;
    c.pct = pct_change(r.median, base->median);
    out.rows.push_back(std::move(c));
  }
  return out;
}

inline constexpr const char* kComparisonHeader =
    "algorithm,n,metric,median,baseline_median,pct_change";

inline void write_comparison_csv(const ComparisonResult& cmp,
                                 std::ostream& os) {
  os << kComparisonHeader << '\n';
  for (const ComparisonRow& r : cmp.rows) {
    os << detail::csv_escape(r.algorithm) << ',' << r.n << ',' << r.metric
       << ',' << format_number(r.median) << ','
       << format_number(r.baseline_median) << ',' << format_number(r.pct)
       << '\n';
  }
}

}  // namespace cwsim
