#pragma once
#include <cstdint>

namespace cwsim {

// Counter-based pseudo-random generator (Philox4x32-10).
//
// Every draw is a pure function of (key, counter): there is no hidden state,
// so any draw can be reproduced in isolation.  The simulator keys one stream
// per (trial seed, station, window); results are therefore identical no
// matter how trials are scheduled across threads or in what order stations
// are visited.

namespace detail {

inline void philox_mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  uint64_t p = uint64_t(a) * uint64_t(b);
  hi = uint32_t(p >> 32);
  lo = uint32_t(p);
}

}  // namespace detail

struct PhiloxBlock {
  uint32_t x[4];
};

// One 10-round Philox4x32 block.  Constants from the reference design.
inline PhiloxBlock philox4x32(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3,
                              uint32_t k0, uint32_t k1) {
  for (int round = 0; round < 10; ++round) {
    uint32_t hi0, lo0, hi1, lo1;
    detail::philox_mulhilo(0xD2511F53u, c0, hi0, lo0);
    detail::philox_mulhilo(0xCD9E8D57u, c2, hi1, lo1);
    uint32_t n0 = hi1 ^ c1 ^ k0;
    uint32_t n1 = lo1;
    uint32_t n2 = hi0 ^ c3 ^ k1;
    uint32_t n3 = lo0;
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
    k0 += 0x9E3779B9u;  // golden-ratio Weyl increments
    k1 += 0xBB67AE85u;
  }
  return PhiloxBlock{{c0, c1, c2, c3}};
}

// A stream of 64-bit values at a fixed (key, lane) position.  `next` is the
// only moving part; everything else pins the stream's identity.
struct CounterStream {
  uint32_t k0 = 0, k1 = 0;                   // key (e.g. split trial seed)
  uint32_t lane1 = 0, lane2 = 0, lane3 = 0;  // stream identity
  uint32_t next = 0;

  uint64_t next_u64() {
    PhiloxBlock b = philox4x32(next++, lane1, lane2, lane3, k0, k1);
    return uint64_t(b.x[0]) | (uint64_t(b.x[1]) << 32);
  }
};

inline CounterStream make_stream(uint64_t seed, uint32_t lane1, uint32_t lane2,
                                 uint32_t lane3) {
  CounterStream s;
  s.k0 = uint32_t(seed);
  s.k1 = uint32_t(seed >> 32);
  s.lane1 = lane1;
  s.lane2 = lane2;
  s.lane3 = lane3;
  return s;
}

// Uniform draw in [0, bound).  Threshold rejection keeps the draw unbiased
// for every bound (plain modulo would skew small slots of non-power-of-two
// windows).  bound must be nonzero.
inline uint64_t uniform_below(CounterStream& s, uint64_t bound) {
  uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
  for (;;) {
    uint64_t r = s.next_u64();
    if (r >= threshold) return r % bound;
  }
}

// Stateless 64-bit mix of a seed and up to three indices; used to derive
// per-trial seeds and per-summary bootstrap seeds from one master seed.
inline uint64_t mix64(uint64_t seed, uint32_t a, uint32_t b, uint32_t c,
                      uint32_t tag = 0) {
  PhiloxBlock blk =
      philox4x32(a, b, c, tag, uint32_t(seed), uint32_t(seed >> 32));
  return uint64_t(blk.x[0]) | (uint64_t(blk.x[1]) << 32);
}

// Lane/tag constants so distinct uses can never collide on a stream.
inline constexpr uint32_t kSlotDrawTag = 0x510Du;
inline constexpr uint32_t kTrialSeedTag = 0x7121u;
inline constexpr uint32_t kBootstrapTag = 0xB007u;

}  // namespace cwsim
