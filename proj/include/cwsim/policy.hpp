#pragma once
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace cwsim {

// Contention-window schedules.
//
// A policy describes the deterministic sequence of window sizes a station
// walks through while it keeps colliding.  Three families:
//   * monotone growth  — beb doubles; lb and llb multiply by (1 + f(w)) with
//     f(w) = 1/lg w and 1/lg lg w respectively, rounding up;
//   * sawtooth         — stb starts run r at initial*2^r and halves down to a
//     floor; tstb emits only the first ceil(lg(c*lg L)) windows of each run,
//     with sizes clamped below by max(floor(L/(c*lg L)), 4);
//   * slowed doubling  — llb_star / lb_star repeat each size ceil(lglg(w)/2)
//     or ceil(lg(w)/2) times before doubling.
// (lg = log base 2 throughout.)

enum class PolicyKind { beb, lb, llb, stb, tstb, llb_star, lb_star };

inline const char* to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::beb: return "beb";
    case PolicyKind::lb: return "lb";
    case PolicyKind::llb: return "llb";
    case PolicyKind::stb: return "stb";
    case PolicyKind::tstb: return "tstb";
    case PolicyKind::llb_star: return "llb_star";
    case PolicyKind::lb_star: return "lb_star";
  }
  throw std::logic_error("unknown policy kind");
}

// Emitted sizes saturate here long before uint64 arithmetic could wrap.
inline constexpr uint64_t kWindowCeiling = uint64_t(1) << 62;

namespace detail {

inline double lg(double x) { return std::log2(x); }

inline uint64_t saturating_double(uint64_t w) {
  return w >= kWindowCeiling / 2 ? kWindowCeiling : w * 2;
}

inline uint64_t saturating_shift(uint64_t w, uint32_t r) {
  return (r >= 62 || w >= (kWindowCeiling >> r)) ? kWindowCeiling : (w << r);
}

}  // namespace detail

struct BackoffPolicy {
  PolicyKind kind = PolicyKind::beb;
  uint64_t initial_window = 4;
  std::optional<uint64_t> max_window;  // emitted sizes never exceed this
  double truncation_c = 1.0;           // tstb run-length constant
  uint64_t descent_floor = 4;          // stb/tstb halving floor

  // Throws std::invalid_argument when fields are inconsistent.  The lg-based
  // kinds need initial_window >= 4 so their growth/width functions are
  // well-defined and bounded by 1; beb and stb have no such restriction.
  void validate() const {
    if (initial_window == 0)
      throw std::invalid_argument("initial window must be positive");
    switch (kind) {
      case PolicyKind::lb:
      case PolicyKind::llb:
      case PolicyKind::lb_star:
      case PolicyKind::llb_star:
      case PolicyKind::tstb:
        if (initial_window < 4)
          throw std::invalid_argument(
              std::string(to_string(kind)) +
              " needs initial window >= 4 (log-based growth)");
        break;
      case PolicyKind::beb:
      case PolicyKind::stb:
        break;
    }
    if (max_window && *max_window < initial_window)
      throw std::invalid_argument("max window below initial window");
    if (!(truncation_c > 0.0) || !std::isfinite(truncation_c))
      throw std::invalid_argument("truncation constant must be positive");
    if (descent_floor == 0)
      throw std::invalid_argument("descent floor must be positive");
  }

  static BackoffPolicy parse(std::string_view descriptor);
  std::string descriptor() const;
};

// Cursor over a policy's window sequence.  Advancing is pure: next_window
// returns the emitted size plus the advanced cursor, so schedules can be
// shared, copied, and replayed freely.
struct WindowSchedule {
  BackoffPolicy policy;

  // Cursor state; which fields matter depends on policy.kind.
  uint64_t mono_w = 0;       // monotone / starred: size about to be emitted
  uint32_t reps_left = 0;    // starred: emissions left at mono_w
  uint32_t run = 0;          // sawtooth: run index
  uint64_t run_size = 0;     // sawtooth: size about to be emitted
  uint32_t run_emitted = 0;  // tstb: windows emitted in current run

  explicit WindowSchedule(BackoffPolicy p) : policy(std::move(p)) {
    policy.validate();
    switch (policy.kind) {
      case PolicyKind::beb:
      case PolicyKind::lb:
      case PolicyKind::llb:
        mono_w = policy.initial_window;
        break;
      case PolicyKind::llb_star:
      case PolicyKind::lb_star:
        mono_w = policy.initial_window;
        reps_left = star_reps(policy.kind, mono_w);
        break;
      case PolicyKind::stb:
      case PolicyKind::tstb:
        run = 0;
        run_size = policy.initial_window;
        run_emitted = 0;
        break;
    }
  }

  static uint32_t star_reps(PolicyKind k, uint64_t w) {
    double lgw = detail::lg(double(w));
    double raw = k == PolicyKind::lb_star ? lgw / 2.0
                                          : detail::lg(lgw) / 2.0;
    double r = std::ceil(raw);
    return r < 1.0 ? 1u : uint32_t(r);
  }

  uint64_t next();  // convenience: advance in place
};

inline uint64_t apply_cap(const BackoffPolicy& p, uint64_t w) {
  uint64_t cap = p.max_window ? *p.max_window : kWindowCeiling;
  return w > cap ? cap : w;
}

namespace detail {

inline uint64_t grow_monotone(PolicyKind kind, uint64_t w) {
  if (kind == PolicyKind::beb) return saturating_double(w);
  double f = kind == PolicyKind::lb ? 1.0 / lg(double(w))
                                    : 1.0 / lg(lg(double(w)));
  double next = std::ceil((1.0 + f) * double(w));
  if (next >= double(kWindowCeiling)) return kWindowCeiling;
  return uint64_t(next);
}

// Truncated sawtooth run geometry for leading size L.
inline uint32_t tstb_run_length(double c, uint64_t L) {
  double raw = std::ceil(lg(c * lg(double(L))));
  return raw < 1.0 ? 1u : uint32_t(raw);
}

inline uint64_t tstb_lower_clamp(double c, uint64_t L) {
  uint64_t lo = uint64_t(std::floor(double(L) / (c * lg(double(L)))));
  return lo < 4 ? 4 : lo;
}

}  // namespace detail

inline std::pair<uint64_t, WindowSchedule> next_window(const WindowSchedule& s) {
  WindowSchedule adv = s;
  const BackoffPolicy& p = s.policy;
  uint64_t emitted = 0;
  switch (p.kind) {
    case PolicyKind::beb:
    case PolicyKind::lb:
    case PolicyKind::llb:
      emitted = apply_cap(p, s.mono_w);
      adv.mono_w = detail::grow_monotone(p.kind, s.mono_w);
      if (adv.mono_w <= s.mono_w && s.mono_w < kWindowCeiling)
        throw std::logic_error("window schedule cursor is corrupted");
      break;

    case PolicyKind::llb_star:
    case PolicyKind::lb_star:
      emitted = apply_cap(p, s.mono_w);
      if (s.reps_left == 0)
        throw std::logic_error("window schedule cursor is corrupted");
      adv.reps_left = s.reps_left - 1;
      if (adv.reps_left == 0) {
        adv.mono_w = detail::saturating_double(s.mono_w);
        adv.reps_left = WindowSchedule::star_reps(p.kind, adv.mono_w);
      }
      break;

    case PolicyKind::stb: {
      emitted = apply_cap(p, s.run_size);
      if (s.run_size / 2 >= p.descent_floor) {
        adv.run_size = s.run_size / 2;
      } else {
        adv.run = s.run + 1;
        adv.run_size = detail::saturating_shift(p.initial_window, adv.run);
      }
      break;
    }

    case PolicyKind::tstb: {
      uint64_t L = detail::saturating_shift(p.initial_window, s.run);
      uint32_t len = detail::tstb_run_length(p.truncation_c, L);
      uint64_t lo = detail::tstb_lower_clamp(p.truncation_c, L);
      uint64_t raw = s.run_emitted >= 63 ? 0 : (L >> s.run_emitted);
      emitted = apply_cap(p, raw > lo ? raw : lo);
      if (s.run_emitted + 1 < len) {
        adv.run_emitted = s.run_emitted + 1;
      } else {
        adv.run = s.run + 1;
        adv.run_emitted = 0;
      }
      break;
    }

    default:
      throw std::logic_error("window schedule cursor is corrupted");
  }
  if (emitted == 0) throw std::logic_error("window schedule cursor is corrupted");
  return {emitted, adv};
}

inline uint64_t WindowSchedule::next() {
  auto [w, adv] = next_window(*this);
  *this = adv;
  return w;
}

// --- descriptor grammar -----------------------------------------------------
//
//   kind[:key=value[,key=value]...]
//
// kinds: beb lb llb stb tstb llb_star lb_star  (llb* / lb* accepted)
// keys:  w0=<int>  cap=<int>  c=<float>  floor=<int>
// Examples: "beb", "beb:w0=4,cap=4096", "tstb:w0=4,c=2".

namespace detail {

inline uint64_t parse_u64(std::string_view v, std::string_view what) {
  if (v.empty()) throw std::invalid_argument("empty value for " + std::string(what));
  uint64_t out = 0;
  for (char ch : v) {
    if (ch < '0' || ch > '9')
      throw std::invalid_argument("bad integer '" + std::string(v) + "' for " +
                                  std::string(what));
    uint64_t digit = uint64_t(ch - '0');
    if (out > (UINT64_MAX - digit) / 10)
      throw std::invalid_argument("integer overflow in " + std::string(what));
    out = out * 10 + digit;
  }
  return out;
}

inline double parse_pos_double(std::string_view v, std::string_view what) {
  try {
    size_t used = 0;
    std::string tmp(v);
    double d = std::stod(tmp, &used);
    if (used != tmp.size()) throw std::invalid_argument("trailing junk");
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad number '" + std::string(v) + "' for " +
                                std::string(what));
  }
}

}  // namespace detail

inline BackoffPolicy BackoffPolicy::parse(std::string_view descriptor) {
  BackoffPolicy p;
  std::string_view kind = descriptor;
  std::string_view args;
  if (auto colon = descriptor.find(':'); colon != std::string_view::npos) {
    kind = descriptor.substr(0, colon);
    args = descriptor.substr(colon + 1);
  }

  if (kind == "beb") p.kind = PolicyKind::beb;
  else if (kind == "lb") p.kind = PolicyKind::lb;
  else if (kind == "llb") p.kind = PolicyKind::llb;
  else if (kind == "stb") p.kind = PolicyKind::stb;
  else if (kind == "tstb") p.kind = PolicyKind::tstb;
  else if (kind == "llb_star" || kind == "llb*") p.kind = PolicyKind::llb_star;
  else if (kind == "lb_star" || kind == "lb*") p.kind = PolicyKind::lb_star;
  else
    throw std::invalid_argument(
        "unknown policy kind '" + std::string(kind) +
        "' (expected beb, lb, llb, stb, tstb, llb_star, lb_star)");

  while (!args.empty()) {
    auto comma = args.find(',');
    std::string_view item = args.substr(0, comma);
    args = comma == std::string_view::npos ? std::string_view{}
                                           : args.substr(comma + 1);
    auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("expected key=value, got '" +
                                  std::string(item) + "'");
    std::string_view key = item.substr(0, eq);
    std::string_view val = item.substr(eq + 1);
    if (key == "w0") p.initial_window = detail::parse_u64(val, "w0");
    else if (key == "cap") p.max_window = detail::parse_u64(val, "cap");
    else if (key == "c") p.truncation_c = detail::parse_pos_double(val, "c");
    else if (key == "floor") p.descent_floor = detail::parse_u64(val, "floor");
    else
      throw std::invalid_argument("unknown policy key '" + std::string(key) +
                                  "' (expected w0, cap, c, floor)");
  }
  p.validate();
  return p;
}

inline std::string BackoffPolicy::descriptor() const {
  std::string out = to_string(kind);
  out += ":w0=" + std::to_string(initial_window);
  if (max_window) out += ",cap=" + std::to_string(*max_window);
  if (kind == PolicyKind::tstb && truncation_c != 1.0) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", truncation_c);
    out += ",c=";
    out += buf;
  }
  if ((kind == PolicyKind::stb || kind == PolicyKind::tstb) &&
      descent_floor != 4)
    out += ",floor=" + std::to_string(descent_floor);
  return out;
}

}  // namespace cwsim
