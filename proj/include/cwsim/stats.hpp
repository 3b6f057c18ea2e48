#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "cwsim/rng.hpp"

namespace cwsim {

// Summary statistics for repeated trials: IQR outlier filtering, medians
// with bootstrap confidence intervals, percent change against a baseline,
// and a flatness check that tests whether medians follow a growth form.

namespace detail {

// Linear-interpolation quantile of a sorted sample, q in [0, 1].
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  double pos = q * double(sorted.size() - 1);
  size_t lo = size_t(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  double frac = pos - double(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace detail

inline double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(values.begin(), values.end());
  return detail::quantile_sorted(values, 0.5);
}

struct FilterResult {
  std::vector<double> kept;  // original order preserved
  size_t removed = 0;
};

// Tukey fences: drop values outside [Q1 - 1.5*IQR, Q3 + 1.5*IQR], with
// quartiles from linear interpolation.  Samples smaller than 4 pass through
// untouched — quartiles are too unstable to justify dropping anything.
inline FilterResult iqr_filter(const std::vector<double>& values) {
  FilterResult out;
  if (values.size() < 4) {
    out.kept = values;
    return out;
  }
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  double q1 = detail::quantile_sorted(sorted, 0.25);
  double q3 = detail::quantile_sorted(sorted, 0.75);
  double iqr = q3 - q1;
  double lo = q1 - 1.5 * iqr;
  double hi = q3 + 1.5 * iqr;
  out.kept.reserve(values.size());
  for (double v : values) {
    if (v < lo || v > hi)
      out.removed++;
    else
      out.kept.push_back(v);
  }
  return out;
}

// 100 * (value - baseline) / baseline.
inline double pct_change(double value, double baseline) {
  if (baseline == 0.0)
    throw std::domain_error("percent change against a zero baseline");
  return 100.0 * (value - baseline) / baseline;
}

struct MedianCI {
  double median = 0;
  double ci_low = 0;
  double ci_high = 0;
};

// Percentile-bootstrap confidence interval for the median.  Resampling is
// driven by a counter-keyed stream, so the interval is a pure function of
// (values, confidence, resamples, seed).
inline MedianCI median_ci(const std::vector<double>& values,
                          double confidence = 0.95, uint32_t resamples = 10000,
                          uint64_t seed = 0) {
  if (values.size() < 2)
    throw std::invalid_argument("confidence interval needs at least 2 values");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("confidence must be in (0, 1)");
  if (resamples == 0) throw std::invalid_argument("need at least 1 resample");

  MedianCI out;
  out.median = median(values);

  size_t k = values.size();
  std::vector<double> resample(k);
  std::vector<double> medians(resamples);
  for (uint32_t b = 0; b < resamples; ++b) {
    CounterStream s = make_stream(seed, b, 0, kBootstrapTag);
    for (size_t i = 0; i < k; ++i)
      resample[i] = values[uniform_below(s, k)];
    std::sort(resample.begin(), resample.end());
    medians[b] = detail::quantile_sorted(resample, 0.5);
  }
  std::sort(medians.begin(), medians.end());
  double alpha = 1.0 - confidence;
  out.ci_low = detail::quantile_sorted(medians, alpha / 2.0);
  out.ci_high = detail::quantile_sorted(medians, 1.0 - alpha / 2.0);
  return out;
}

// Reference growth shapes for the flatness check.  lg = log base 2; the
// iterated-log ratios mirror the shapes the schedules are designed to hit.
enum class GrowthForm {
  linear,          // n
  n_log,           // n * lg n
  n_loglog_ratio,  // n * lglg n / lglglg n
  n_log_ratio,     // n * lg n / lglg n
};

inline const char* to_string(GrowthForm f) {
  switch (f) {
    case GrowthForm::linear: return "linear";
    case GrowthForm::n_log: return "n_log";
    case GrowthForm::n_loglog_ratio: return "n_loglog_ratio";
    case GrowthForm::n_log_ratio: return "n_log_ratio";
  }
  throw std::logic_error("unknown growth form");
}

// Defined for n >= 16 so every nested log is positive.
inline double growth_form_value(GrowthForm f, double n) {
  if (!(n >= 16.0))
    throw std::invalid_argument("growth forms need n >= 16");
  double lg1 = std::log2(n);
  double lg2 = std::log2(lg1);
  switch (f) {
    case GrowthForm::linear: return n;
    case GrowthForm::n_log: return n * lg1;
    case GrowthForm::n_loglog_ratio: return n * lg2 / std::log2(lg2);
    case GrowthForm::n_log_ratio: return n * lg1 / lg2;
  }
  throw std::logic_error("unknown growth form");
}

struct FlatnessResult {
  bool pass = false;
  std::vector<double> ratios;       // median_i / form(n_i)
  double max_deviation = 0;         // max |ratio_i / ratio_last - 1|
};

// Tests whether medians measured at increasing n follow `form` times a
// constant: normalize each median by the form and compare every ratio to the
// last (largest-n) one.
inline FlatnessResult flatness_check(const std::vector<double>& n_values,
                                     const std::vector<double>& medians,
                                     GrowthForm form, double tolerance) {
  if (n_values.size() != medians.size())
    throw std::invalid_argument("n_values and medians must align");
  if (n_values.size() < 3)
    throw std::invalid_argument("flatness check needs at least 3 points");
  if (!(tolerance > 0))
    throw std::invalid_argument("tolerance must be positive");
  for (size_t i = 0; i + 1 < n_values.size(); ++i)
    if (!(n_values[i] < n_values[i + 1]))
      throw std::invalid_argument("n_values must be strictly increasing");

  FlatnessResult out;
  out.ratios.reserve(n_values.size());
  for (size_t i = 0; i < n_values.size(); ++i) {
    if (!(medians[i] > 0))
      throw std::invalid_argument("medians must be positive");
    out.ratios.push_back(medians[i] / growth_form_value(form, n_values[i]));
  }
  double last = out.ratios.back();
  for (double r : out.ratios)
    out.max_deviation = std::max(out.max_deviation, std::abs(r / last - 1.0));
  out.pass = out.max_deviation <= tolerance;
  return out;
}

// One aggregated table cell.
struct SummaryRow {
  std::string algorithm;
  uint32_t n = 0;
  std::string metric;
  size_t count = 0;             // values kept after filtering
  size_t outliers_removed = 0;
  double median = 0;
  double ci_low = 0;
  double ci_high = 0;
  double mean = 0;
};

// Fixed-point decimal with at most 6 fractional digits, trailing zeros
// trimmed; integers print without a decimal point.  Keeps CSV output
// byte-stable across runs and platforms.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    size_t end = s.find_last_not_of('0');
    if (s[end] == '.') end--;
    s.erase(end + 1);
  }
  return s;
}

}  // namespace cwsim
