#pragma once

// Deterministic random source used everywhere in this library.
//
// The generator is xoshiro256++ keyed through the splitmix64 finalizer, so a
// (seed, stream) pair always yields the same byte-for-byte draw sequence on
// any platform. Standard-library distributions are deliberately avoided:
// std::normal_distribution and friends are implementation-defined and do not
// reproduce across toolchains. Normal draws use Box-Muller (two 64-bit draws
// per pair, second value cached), bounded integers use rejection sampling.

#include <cmath>
#include <cstdint>

namespace slicedmi {

namespace detail {

// splitmix64 finalizer (Vigna). Also used as the stream-derivation hash.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(detail::mix64(seed ^ detail::mix64(stream))) {
    // Expand the key into xoshiro state with a splitmix64 walk.
    std::uint64_t sm = key_;
    for (auto& word : state_) {
      sm += 0x9E3779B97F4A7C15ULL;
      word = detail::mix64(sm);
    }
    state_[0] |= 1;  // the all-zero state is the one forbidden input
  }

  // Child generator for sub-stream `stream`. Derivation is a hash chain on
  // the parent key, so derived(i) is stable no matter what was drawn before.
  SeededRng derived(std::uint64_t stream) const { return SeededRng(key_, stream); }

  // xoshiro256++ core step.
  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53-bit resolution. One draw.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on [a, b). One draw.
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Standard normal via Box-Muller. Pairs cost two draws; the sine partner
  // is cached, so consumption alternates 2, 0, 2, 0, ... draws per call.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    // u1 in (0, 1] keeps the log finite.
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Fair coin mapped to +1/-1. One draw, no rounding involved.
  double sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  // Unbiased integer in [0, n). Rejection below 2^64 mod n.
  std::uint64_t uniform_below(std::uint64_t n) {
    const std::uint64_t limit = (0 - n) % n;
    std::uint64_t r = next_u64();
    while (r < limit) r = next_u64();
    return r % n;
  }

 private:
  std::uint64_t key_;
  std::uint64_t state_[4];
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace slicedmi
