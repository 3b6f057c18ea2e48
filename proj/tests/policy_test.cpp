#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "cwsim/policy.hpp"

using cwsim::BackoffPolicy;
using cwsim::PolicyKind;
using cwsim::WindowSchedule;

namespace {

std::vector<uint64_t> first_windows(const BackoffPolicy& p, size_t count) {
  WindowSchedule s(p);
  std::vector<uint64_t> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) out.push_back(s.next());
  return out;
}

std::vector<uint64_t> first_windows(const std::string& descriptor,
                                    size_t count) {
  return first_windows(BackoffPolicy::parse(descriptor), count);
}

}  // namespace

// Golden sequences below were frozen from an exact-arithmetic (60-digit)
// reference implementation of each recurrence, independent of this library.

TEST_CASE("doubling schedule golden sequence") {
  CHECK(first_windows("beb", 20) ==
        std::vector<uint64_t>{4,     8,     16,    32,     64,     128,
                              256,   512,   1024,  2048,   4096,   8192,
                              16384, 32768, 65536, 131072, 262144, 524288,
                              1048576, 2097152});
}

TEST_CASE("log backoff golden sequence") {
  CHECK(first_windows("lb", 20) ==
        std::vector<uint64_t>{4,  6,  9,  12, 16,  20,  25,  31,  38,  46,
                              55, 65, 76, 89, 103, 119, 137, 157, 179, 203});
  CHECK(first_windows("lb:w0=16", 20) ==
        std::vector<uint64_t>{16,  20,  25,  31,  38,  46,  55,
                              65,  76,  89,  103, 119, 137, 157,
                              179, 203, 230, 260, 293, 329});
}

TEST_CASE("loglog backoff golden sequence") {
  CHECK(first_windows("llb", 20) ==
        std::vector<uint64_t>{4,   8,   14,  22,  33,  48,  68,
                              95,  130, 177, 239, 320, 425, 561,
                              737, 964, 1256, 1630, 2108, 2717});
  CHECK(first_windows("llb:w0=16", 20) ==
        std::vector<uint64_t>{16,  24,  35,  50,   71,   99,   136,
                              185, 249, 333, 442,  583,  766,  1001,
                              1303, 1690, 2184, 2814, 3614, 4629});
}

TEST_CASE("sawtooth golden sequence") {
  CHECK(first_windows("stb", 20) ==
        std::vector<uint64_t>{4,  8,  4, 16, 8,  4,  32, 16, 8,  4,
                              64, 32, 16, 8, 4, 128, 64, 32, 16, 8});
}

TEST_CASE("truncated sawtooth golden sequences") {
  CHECK(first_windows("tstb", 20) ==
        std::vector<uint64_t>{4,  8,  4,  16, 8,   32,  16, 8,  64, 32,
                              16, 128, 64, 32, 256, 128, 64, 512, 256, 128});
  CHECK(first_windows("tstb:c=2", 20) ==
        std::vector<uint64_t>{4,  4, 8,  4,  4, 16, 8,  4,  32, 16,
                              8,  4, 64, 32, 16, 8, 128, 64, 32, 16});
}

TEST_CASE("slowed doubling golden sequences") {
  CHECK(first_windows("llb_star", 20) ==
        std::vector<uint64_t>{4,   8,   16,  32,  32,   64,   64,
                              128, 128, 256, 256, 512,  512,  1024,
                              1024, 2048, 2048, 4096, 4096, 8192});
  CHECK(first_windows("lb_star", 20) ==
        std::vector<uint64_t>{4,  8,  8,  16, 16, 32,  32,  32,  64, 64,
                              64, 128, 128, 128, 128, 256, 256, 256, 256,
                              512});
}

TEST_CASE("max window caps emitted sizes") {
  auto w = first_windows("beb:w0=4,cap=4096", 14);
  std::vector<uint64_t> expect{4,   8,   16,   32,   64,   128,  256,
                               512, 1024, 2048, 4096, 4096, 4096, 4096};
  CHECK(w == expect);
}

TEST_CASE("monotone kinds never shrink and grow strictly below the ceiling") {
  for (const char* d : {"beb", "lb", "llb"}) {
    auto w = first_windows(d, 64);
    for (size_t i = 1; i < w.size(); ++i) {
      INFO(d << " at window " << i);
      if (w[i] < cwsim::kWindowCeiling)
        CHECK(w[i] > w[i - 1]);  // strict growth until saturation
      else
        CHECK(w[i] >= w[i - 1]);
    }
  }
}

TEST_CASE("growth dominance: beb >= llb >= lb windowwise") {
  auto beb = first_windows("beb", 64);
  auto llb = first_windows("llb", 64);
  auto lb = first_windows("lb", 64);
  for (size_t i = 0; i < 64; ++i) {
    INFO("window " << i);
    CHECK(beb[i] >= llb[i]);
    CHECK(llb[i] >= lb[i]);
  }
}

TEST_CASE("sawtooth runs double their leading window and halve to the floor") {
  WindowSchedule s(BackoffPolicy::parse("stb"));
  for (uint32_t run = 0; run < 10; ++run) {
    uint64_t lead = uint64_t(4) << run;
    for (uint64_t expect = lead; expect >= 4; expect /= 2)
      CHECK(s.next() == expect);
  }
}

TEST_CASE("truncated sawtooth sizes never fall below the width clamp") {
  // Per run with leading size L: count = max(1, ceil(lg(c*lg L))) windows,
  // each at least max(floor(L/(c*lg L)), 4).
  for (double c : {0.5, 1.0, 2.0, 3.7}) {
    BackoffPolicy p = BackoffPolicy::parse("tstb");
    p.truncation_c = c;
    WindowSchedule s(p);
    for (uint32_t run = 0; run < 12; ++run) {
      double L = double(uint64_t(4) << run);
      double width = c * std::log2(L);
      uint32_t count = uint32_t(std::max(1.0, std::ceil(std::log2(width))));
      uint64_t clamp =
          std::max(uint64_t(std::floor(L / width)), uint64_t(4));
      uint64_t prev = UINT64_MAX;
      for (uint32_t k = 0; k < count; ++k) {
        uint64_t w = s.next();
        INFO("c=" << c << " run=" << run << " k=" << k);
        CHECK(w >= clamp);
        CHECK(w <= uint64_t(L));
        CHECK(w <= prev);
        prev = w;
      }
    }
  }
}

TEST_CASE("starred schedules repeat each size the prescribed number of times") {
  // repeats(w) = ceil(lg(w)/2) for lb_star, ceil(lglg(w)/2) for llb_star.
  WindowSchedule lbs(BackoffPolicy::parse("lb_star"));
  uint64_t w = 4;
  for (int step = 0; step < 8; ++step) {
    uint32_t reps = uint32_t(std::ceil(std::log2(double(w)) / 2.0));
    for (uint32_t r = 0; r < reps; ++r) CHECK(lbs.next() == w);
    w *= 2;
  }
}

TEST_CASE("descriptor parsing accepts parameters and aliases") {
  BackoffPolicy p = BackoffPolicy::parse("tstb:w0=8,c=2.5,cap=1024");
  CHECK(p.kind == PolicyKind::tstb);
  CHECK(p.initial_window == 8);
  CHECK(p.truncation_c == 2.5);
  REQUIRE(p.max_window.has_value());
  CHECK(*p.max_window == 1024);

  CHECK(BackoffPolicy::parse("llb*").kind == PolicyKind::llb_star);
  CHECK(BackoffPolicy::parse("lb*").kind == PolicyKind::lb_star);
  CHECK(BackoffPolicy::parse("stb:floor=8").descent_floor == 8);
}

TEST_CASE("descriptor round-trips through its canonical form") {
  for (const char* d : {"beb", "lb:w0=16", "tstb:w0=4,c=2", "stb:floor=8",
                        "beb:w0=2", "llb_star"}) {
    BackoffPolicy p = BackoffPolicy::parse(d);
    BackoffPolicy q = BackoffPolicy::parse(p.descriptor());
    CHECK(q.kind == p.kind);
    CHECK(q.initial_window == p.initial_window);
    CHECK(q.max_window == p.max_window);
    CHECK(q.truncation_c == p.truncation_c);
    CHECK(q.descent_floor == p.descent_floor);
  }
}

TEST_CASE("descriptor parsing rejects malformed input") {
  CHECK_THROWS_AS(BackoffPolicy::parse("feb"), std::invalid_argument);
  CHECK_THROWS_AS(BackoffPolicy::parse("beb:w0"), std::invalid_argument);
  CHECK_THROWS_AS(BackoffPolicy::parse("beb:w0=abc"), std::invalid_argument);
  CHECK_THROWS_AS(BackoffPolicy::parse("beb:zz=4"), std::invalid_argument);
  CHECK_THROWS_AS(BackoffPolicy::parse("beb:w0=0"), std::invalid_argument);
  CHECK_THROWS_AS(BackoffPolicy::parse("tstb:c=0"), std::invalid_argument);
  CHECK_THROWS_AS(BackoffPolicy::parse("tstb:c=-1"), std::invalid_argument);
  CHECK_THROWS_AS(BackoffPolicy::parse("beb:w0=8,cap=4"),
                  std::invalid_argument);
}

TEST_CASE("log-based kinds require initial window of at least 4") {
  for (const char* d : {"lb:w0=2", "llb:w0=3", "lb_star:w0=2",
                        "llb_star:w0=3", "tstb:w0=2"})
    CHECK_THROWS_AS(BackoffPolicy::parse(d), std::invalid_argument);
  // Doubling and sawtooth schedules are well-defined from any positive size.
  CHECK(first_windows("beb:w0=2", 3) == std::vector<uint64_t>{2, 4, 8});
  CHECK(first_windows("beb:w0=3", 3) == std::vector<uint64_t>{3, 6, 12});
  CHECK_NOTHROW(BackoffPolicy::parse("stb:w0=1"));
}

TEST_CASE("schedule cursors are value types: copies advance independently") {
  WindowSchedule a(BackoffPolicy::parse("stb"));
  a.next();  // 4
  WindowSchedule b = a;
  CHECK(a.next() == 8);
  CHECK(a.next() == 4);
  CHECK(b.next() == 8);  // copy unaffected by a's advance
  auto [w1, adv] = cwsim::next_window(b);
  CHECK(w1 == 4);
  auto [w2, adv2] = cwsim::next_window(b);  // pure: same cursor, same answer
  CHECK(w2 == 4);
  (void)adv;
  (void)adv2;
}
