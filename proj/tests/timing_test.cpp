#include <catch2/catch_amalgamated.hpp>

#include "cwsim/engine.hpp"
#include "cwsim/policy.hpp"
#include "cwsim/timing.hpp"

using cwsim::BackoffPolicy;
using cwsim::execution_time_us;
using cwsim::run_trial;
using cwsim::TimingParams;
using cwsim::timing_profile;
using cwsim::TrialTrace;
using cwsim::tx_delay_us;

TEST_CASE("transmission delay rounds the frame time up to whole microseconds") {
  TimingParams p;  // 128 bytes at 54 Mbps = 18.96 us
  CHECK(tx_delay_us(p) == 19);

  p.payload_bytes = 1024;
  p.overhead_bytes = 0;
  CHECK(tx_delay_us(p) == 152);  // 8192/54 = 151.7

  p.payload_bytes = 54;
  CHECK(tx_delay_us(p) == 8);  // exactly 8.0, no rounding
}

TEST_CASE("execution time decomposes into slot, collision, and success terms") {
  // 1326 idle slots, 225 collisions, 150 successes at default parameters:
  //   slots      1326 * 9                = 11,934 us
  //   collisions  225 * (19 + 20 + 75)   = 25,650 us
  //   successes   150 * (19 + 20 + 34)   = 10,950 us
  TimingParams p;
  CHECK(execution_time_us(1326, 0, 0, p) == 11934);
  CHECK(execution_time_us(0, 225, 0, p) == 25650);
  CHECK(execution_time_us(0, 0, 150, p) == 10950);
  CHECK(execution_time_us(1326, 225, 150, p) == 48534);
}

TEST_CASE("trace overload charges one success per station") {
  TimingParams p;
  for (uint64_t seed = 0; seed < 25; ++seed) {
    TrialTrace t = run_trial(BackoffPolicy::parse("beb"), 17, seed);
    CHECK(execution_time_us(t, p) ==
          execution_time_us(t.cw_slots_total, t.collision_slots_total, 17, p));
  }
}

TEST_CASE("collision-free single-station trace costs slots plus one delivery") {
  TimingParams p;
  TrialTrace t = run_trial(BackoffPolicy::parse("beb"), 1, 11);
  REQUIRE(t.collision_slots_total == 0);
  CHECK(execution_time_us(t, p) == t.cw_slots_total * 9 + (19 + 20 + 34));
}

TEST_CASE("named profiles carry the documented parameter sets") {
  TimingParams d = timing_profile("80211g-default");
  CHECK(d.slot_us == 9);
  CHECK(d.sifs_us == 16);
  CHECK(d.difs_us == 34);
  CHECK(d.ack_timeout_us == 75);
  CHECK(d.preamble_us == 20);
  CHECK(d.data_rate_mbps == 54.0);
  CHECK(d.payload_bytes == 64);
  CHECK(d.overhead_bytes == 64);
  CHECK(d.ack_turnaround_us == 34);

  TimingParams c = timing_profile("80211g-compat");
  CHECK(c.slot_us == 20);
  CHECK(c.sifs_us == 10);
  CHECK(c.difs_us == 50);  // SIFS + 2 slots
  CHECK(c.ack_timeout_us == 75);

  CHECK_THROWS_AS(timing_profile("80211n"), std::invalid_argument);
}

TEST_CASE("longer slots scale the idle term only") {
  TimingParams d = timing_profile("80211g-default");
  TimingParams c = timing_profile("80211g-compat");
  CHECK(execution_time_us(100, 0, 0, c) - execution_time_us(100, 0, 0, d) ==
        100 * (20 - 9));
  // Collision and success terms do not involve the slot length.
  CHECK(execution_time_us(0, 10, 5, c) == execution_time_us(0, 10, 5, d));
}

TEST_CASE("degenerate timing parameters are rejected") {
  TimingParams p;
  p.slot_us = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = TimingParams{};
  p.data_rate_mbps = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = TimingParams{};
  p.payload_bytes = 0;
  p.overhead_bytes = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_NOTHROW(TimingParams{}.validate());
}
