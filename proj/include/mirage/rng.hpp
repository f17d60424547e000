#ifndef MIRAGE_RNG_HPP
#define MIRAGE_RNG_HPP

#include <cstdint>

namespace mirage {

// SplitMix64 (Steele/Lea/Flood). Used for seed expansion and key material.
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

// Mixes (seed, stream) into a single 64-bit value so that parallel trials get
// decorrelated generators from one base seed.
inline uint64_t derive_stream_seed(uint64_t seed, uint64_t stream) {
  SplitMix64 sm(seed ^ (0x6a09e667f3bcc909ULL + stream * 0x2545f4914f6cdd1dULL));
  uint64_t v = sm.next();
  return v ^ sm.next();
}

// xoshiro256++ (Blackman/Vigna), public-domain reference algorithm.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& w : s_) w = sm.next();
  }

  static Xoshiro256pp for_stream(uint64_t seed, uint64_t stream) {
    return Xoshiro256pp(derive_stream_seed(seed, stream));
  }

  uint64_t next() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Unbiased uniform integer in [0, bound). Lemire's multiply-with-rejection.
  uint64_t next_below(uint64_t bound) {
    __uint128_t m = static_cast<__uint128_t>(next()) * bound;
    uint64_t lo = static_cast<uint64_t>(m);
    if (lo < bound) {
      uint64_t threshold = (0 - bound) % bound;
      while (lo < threshold) {
        m = static_cast<__uint128_t>(next()) * bound;
        lo = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool next_bool() {
    if (bit_count_ == 0) {
      bit_buffer_ = next();
      bit_count_ = 64;
    }
    bool b = bit_buffer_ & 1;
    bit_buffer_ >>= 1;
    --bit_count_;
    return b;
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t s_[4];
  uint64_t bit_buffer_ = 0;
  int bit_count_ = 0;
};

}  // namespace mirage

#endif  // MIRAGE_RNG_HPP
