#pragma once
#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cwsim/policy.hpp"
#include "cwsim/rng.hpp"

namespace cwsim {

// Batched-arrival contention simulator.
//
// All n stations wake at slot 0 holding one packet each.  Every station picks
// one slot uniformly at random in each window of the shared schedule; a slot
// with exactly one transmitter is a success (that station leaves before the
// next window), a slot with two or more is a collision.  The trial ends with
// the window in which the last station succeeds.

struct WindowRecord {
  uint64_t size = 0;
  uint64_t empty_slots = 0;
  uint64_t success_slots = 0;
  uint64_t collision_slots = 0;
  uint64_t colliding_station_total = 0;  // transmitters summed over collision slots
};

struct TrialTrace {
  uint32_t n = 0;
  std::vector<WindowRecord> windows;
  uint64_t cw_slots_total = 0;        // see EngineOptions::truncate_at_last_success
  uint64_t collision_slots_total = 0;
  std::vector<uint64_t> success_slot_indices;  // global slot index, ascending
  uint64_t half_done_slot = 0;  // slot of the ceil(n/2)-th success
  uint64_t alo_instances = 0;   // slots where at least one station transmitted
  // Per-station collision counts; only populated when logging is enabled.
  std::optional<std::vector<uint32_t>> station_collisions;
};

struct EngineOptions {
  bool log_station_collisions = false;
  // When set, cw_slots_total stops at the slot of the last success instead of
  // running to the end of its window.  Both figures are derivable from any
  // trace: full = sum of window sizes, truncated = last success index + 1.
  bool truncate_at_last_success = false;
  // Abort threshold on total contention-window slots, so degenerate
  // configurations fail loudly instead of spinning.
  uint64_t safety_cap = uint64_t(1) << 32;
};

// Thrown when a trial exceeds EngineOptions::safety_cap.
struct safety_cap_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline uint64_t cw_slots_full(const TrialTrace& t) {
  uint64_t total = 0;
  for (const auto& w : t.windows) total += w.size;
  return total;
}

inline uint64_t cw_slots_truncated(const TrialTrace& t) {
  return t.success_slot_indices.empty() ? 0
                                        : t.success_slot_indices.back() + 1;
}

inline TrialTrace run_trial(const BackoffPolicy& policy, uint32_t n,
                            uint64_t seed, const EngineOptions& opt = {}) {
  if (n == 0) throw std::invalid_argument("need at least one station");
  WindowSchedule sched(policy);

  TrialTrace trace;
  trace.n = n;
  if (opt.log_station_collisions)
    trace.station_collisions = std::vector<uint32_t>(n, 0);

  std::vector<uint32_t> active(n);
  for (uint32_t i = 0; i < n; ++i) active[i] = i;
  std::vector<uint64_t> choice(n, 0);    // indexed by station id
  std::vector<uint32_t> transmitters;    // per-slot count, reused per window

  uint64_t base = 0;  // global slot index of the current window's first slot
  uint32_t window_index = 0;
  while (!active.empty()) {
    uint64_t w = sched.next();
    if (w > opt.safety_cap - base) {  // base + w > cap, overflow-safe
      throw safety_cap_error("trial exceeded safety cap of " +
                             std::to_string(opt.safety_cap) +
                             " contention-window slots (" +
                             policy.descriptor() + ", n=" + std::to_string(n) +
                             ", window " + std::to_string(window_index) +
                             ", " + std::to_string(active.size()) +
                             " stations still active)");
    }
    if (w > transmitters.max_size())
      throw safety_cap_error("window size exceeds addressable memory");
    transmitters.assign(size_t(w), 0);

    for (uint32_t st : active) {
      CounterStream s = make_stream(seed, st, window_index, kSlotDrawTag);
      uint64_t slot = uniform_below(s, w);
      choice[st] = slot;
      transmitters[size_t(slot)]++;
    }

    WindowRecord rec;
    rec.size = w;
    for (uint64_t slot = 0; slot < w; ++slot) {
      uint32_t c = transmitters[size_t(slot)];
      if (c == 0) {
        rec.empty_slots++;
      } else if (c == 1) {
        rec.success_slots++;
      } else {
        rec.collision_slots++;
        rec.colliding_station_total += c;
      }
    }

    std::vector<uint32_t> survivors;
    survivors.reserve(active.size());
    for (uint32_t st : active) {
      if (transmitters[size_t(choice[st])] == 1) {
        trace.success_slot_indices.push_back(base + choice[st]);
      } else {
        survivors.push_back(st);
        if (trace.station_collisions) (*trace.station_collisions)[st]++;
      }
    }

    trace.windows.push_back(rec);
    trace.collision_slots_total += rec.collision_slots;
    base += w;
    window_index++;
    active.swap(survivors);
  }

  std::sort(trace.success_slot_indices.begin(),
            trace.success_slot_indices.end());
  trace.cw_slots_total =
      opt.truncate_at_last_success ? cw_slots_truncated(trace) : base;
  trace.half_done_slot = trace.success_slot_indices[(n + 1) / 2 - 1];
  trace.alo_instances = uint64_t(n) + trace.collision_slots_total;
  return trace;
}

// Largest number of collisions any single station sat through.  Requires the
// trial to have run with log_station_collisions on.
inline uint32_t max_station_collisions(const TrialTrace& t) {
  if (!t.station_collisions)
    throw std::logic_error(
        "per-station collision counts were not logged for this trial");
  uint32_t best = 0;
  for (uint32_t c : *t.station_collisions) best = std::max(best, c);
  return best;
}

// One line per window, tab-separated:
// index  size  empty  success  collision  colliding_stations
inline void dump_trace(const TrialTrace& t, std::ostream& os) {
  os << "window\tsize\tempty\tsuccess\tcollision\tcolliding_stations\n";
  for (size_t i = 0; i < t.windows.size(); ++i) {
    const WindowRecord& w = t.windows[i];
    os << i << '\t' << w.size << '\t' << w.empty_slots << '\t'
       << w.success_slots << '\t' << w.collision_slots << '\t'
       << w.colliding_station_total << '\n';
  }
}

}  // namespace cwsim
