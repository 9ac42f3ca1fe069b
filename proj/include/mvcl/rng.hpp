#pragma once

#include <cmath>
#include <cstdint>

namespace mvcl {

// Self-contained PRNG stack so every artifact is reproducible byte-for-byte
// across platforms and standard libraries:
//
//   * splitmix64 expands a user seed into generator state and derives
//     decorrelated substreams (one per instance during sampling, so batches
//     are independent of generation order).
//   * xoshiro256++ is the main generator (Blackman & Vigna's public-domain
//     algorithm, period 2^256 - 1).
//   * uniforms take the top 53 bits: (next() >> 11) * 2^-53, giving [0, 1).
//   * gaussians use the polar-free Box-Muller transform on (0, 1] uniforms
//     with the second value cached. std::normal_distribution is deliberately
//     not used: its algorithm is implementation-defined.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream derivation: mixes (seed, tag) into a new seed. Distinct tags give
// decorrelated streams for the same base seed.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t state = seed ^ (0xD1B54A32D192ED03ULL * (tag + 1));
  std::uint64_t out = splitmix64_next(state);
  return out ^ splitmix64_next(state);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64_next(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; generates two values per transform.
  double gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * kPi * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace mvcl
