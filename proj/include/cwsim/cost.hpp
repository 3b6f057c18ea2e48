#pragma once
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cwsim/engine.hpp"

namespace cwsim {

// Abstract slot-cost accounting.
//
// makespan = cw_slots + collision_slots * D, where D is the relative cost of
// a collision slot.  The classic model charges every slot the same (D = 1);
// the extended model lets collisions cost a constant factor or lg(n), which
// matters once real transmissions are longer than an idle backoff slot.

struct CostModel {
  enum class Kind { classic, extended };
  enum class Delay { constant, log2n };

  Kind kind = Kind::classic;
  Delay delay = Delay::constant;
  double d = 1.0;  // constant collision cost (extended/constant only)

  static CostModel classic() { return CostModel{}; }

  static CostModel constant(double d) {
    if (!(d >= 1.0) || !std::isfinite(d))
      throw std::invalid_argument("collision cost must be >= 1");
    return CostModel{Kind::extended, Delay::constant, d};
  }

  static CostModel log2_n() {
    return CostModel{Kind::extended, Delay::log2n, 1.0};
  }

  // "classic", a number >= 1, or "log2n".
  static CostModel parse(std::string_view spec) {
    if (spec == "classic") return classic();
    if (spec == "log2n") return log2_n();
    double v = 0;
    try {
      size_t used = 0;
      std::string tmp(spec);
      v = std::stod(tmp, &used);
      if (used != tmp.size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw std::invalid_argument("bad cost model '" + std::string(spec) +
                                  "' (expected classic, log2n, or a number >= 1)");
    }
    return constant(v);
  }

  std::string spec() const {
    if (kind == Kind::classic) return "classic";
    if (delay == Delay::log2n) return "log2n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", d);
    return buf;
  }

  // Collision slot cost at batch size n; never below 1.
  double collision_cost(uint32_t n) const {
    if (kind == Kind::classic) return 1.0;
    if (delay == Delay::constant) return d;
    if (n == 0) throw std::invalid_argument("batch size must be positive");
    double lg = std::log2(double(n));
    return lg < 1.0 ? 1.0 : lg;
  }
};

inline double makespan(uint64_t cw_slots, uint64_t collision_slots,
                       const CostModel& model, uint32_t n) {
  return double(cw_slots) + double(collision_slots) * model.collision_cost(n);
}

inline double makespan(const TrialTrace& t, const CostModel& model) {
  return makespan(t.cw_slots_total, t.collision_slots_total, model, t.n);
}

}  // namespace cwsim
