// Simulates one batch of stations under each policy and prints the headline
// numbers: CW slots, collision slots, half-batch completion, ALO instances,
// and wall-clock execution time under the default radio profile.
//
//   $ one_batch [n] [seed]

#include <cstdio>
#include <cstdlib>

#include "cwsim/cwsim.hpp"

int main(int argc, char** argv) {
  uint32_t n = argc > 1 ? uint32_t(std::strtoul(argv[1], nullptr, 10)) : 64;
  uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;

  cwsim::TimingParams radio = cwsim::timing_profile("80211g-default");
  std::printf("n = %u, seed = %llu\n\n", n, (unsigned long long)seed);
  std::printf("%-10s %10s %10s %12s %8s %12s\n", "policy", "cw_slots",
              "collisions", "half_done", "alo", "exec_us");

  for (const char* d :
       {"beb", "lb", "llb", "stb", "tstb", "llb_star", "lb_star"}) {
    cwsim::TrialTrace t =
        cwsim::run_trial(cwsim::BackoffPolicy::parse(d), n, seed);
    std::printf("%-10s %10llu %10llu %12llu %8llu %12llu\n", d,
                (unsigned long long)t.cw_slots_total,
                (unsigned long long)t.collision_slots_total,
                (unsigned long long)t.half_done_slot,
                (unsigned long long)t.alo_instances,
                (unsigned long long)cwsim::execution_time_us(t, radio));
  }
  return 0;
}
