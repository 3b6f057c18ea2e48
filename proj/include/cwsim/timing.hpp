#pragma once
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cwsim/engine.hpp"

namespace cwsim {

// Wall-clock accounting for 802.11g-style DCF parameters.
//
// Converts a trace's abstract slot counts into microseconds: idle backoff
// slots cost one slot time; a collision costs the wasted transmission plus
// the preamble and the ACK timeout the senders wait out; a success costs the
// transmission plus preamble plus the (shorter) ACK turnaround.

struct TimingParams {
  uint32_t slot_us = 9;
  uint32_t sifs_us = 16;
  uint32_t difs_us = 34;
  uint32_t ack_timeout_us = 75;
  uint32_t preamble_us = 20;
  double data_rate_mbps = 54.0;
  uint32_t payload_bytes = 64;
  uint32_t overhead_bytes = 64;
  uint32_t ack_turnaround_us = 34;

  void validate() const {
    if (slot_us == 0) throw std::invalid_argument("slot time must be positive");
    if (!(data_rate_mbps > 0) || !std::isfinite(data_rate_mbps))
      throw std::invalid_argument("data rate must be positive");
    if (uint64_t(payload_bytes) + overhead_bytes == 0)
      throw std::invalid_argument("frame must be non-empty");
  }
};

// Microseconds to push one frame (payload + protocol overhead) onto the air,
// rounded up to whole microseconds.
inline uint64_t tx_delay_us(const TimingParams& p) {
  double bits = 8.0 * (double(p.payload_bytes) + double(p.overhead_bytes));
  return uint64_t(std::ceil(bits / p.data_rate_mbps));
}

inline uint64_t execution_time_us(uint64_t cw_slots, uint64_t collision_slots,
                                  uint64_t successes, const TimingParams& p) {
  uint64_t tx = tx_delay_us(p);
  uint64_t per_collision = tx + p.preamble_us + p.ack_timeout_us;
  uint64_t per_success = tx + p.preamble_us + p.ack_turnaround_us;
  return cw_slots * p.slot_us + collision_slots * per_collision +
         successes * per_success;
}

inline uint64_t execution_time_us(const TrialTrace& t, const TimingParams& p) {
  return execution_time_us(t.cw_slots_total, t.collision_slots_total,
                           uint64_t(t.n), p);
}

// Named parameter sets.  "80211g-default" is the 9 us short-slot PHY;
// "80211g-compat" is the long-slot compatibility mode (20 us slots,
// SIFS 10 us, DIFS = SIFS + 2 slots = 50 us).
inline TimingParams timing_profile(std::string_view key) {
  if (key == "80211g-default") return TimingParams{};
  if (key == "80211g-compat") {
    TimingParams p;
    p.slot_us = 20;
    p.sifs_us = 10;
    p.difs_us = 50;
    return p;
  }
  throw std::invalid_argument("unknown timing profile '" + std::string(key) +
                              "' (expected 80211g-default or 80211g-compat)");
}

}  // namespace cwsim
