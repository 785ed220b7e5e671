#pragma once
// SplitMix64. A stream is identified by (seed, index), so per-item
// generators can be created in any order and still give the same values.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace jsvd {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ull))) {}

  std::uint64_t next() { return mix(state_ += kGolden); }
  std::uint64_t operator()() { return next(); }

  // Uniform in (0, 1], 53 random bits.
  double uniform_pos() { return static_cast<double>((next() >> 11) + 1) * 0x1p-53; }

  // Standard normal by Box-Muller (one of the pair is discarded).
  double normal() {
    const double u1 = uniform_pos(), u2 = uniform_pos();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform integer in [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t lim = -n % n;
    for (;;) {
      const std::uint64_t x = next();
      if (x >= lim) return x % n;
    }
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
  std::uint64_t state_;
};

}  // namespace jsvd
