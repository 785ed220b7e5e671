#pragma once
#include <cmath>
#include <cstdint>
#include <cstring>

#include "jsvd/lanes.hpp"
#include "jsvd/rng.hpp"

namespace jsvd::test {

constexpr double eps = FloatEnv::eps;
constexpr double mu = FloatEnv::mu_check;
constexpr double omega = FloatEnv::omega;
constexpr double inf = FloatEnv::inf;

inline bool same_bits(double a, double b) { return fp::bits(a) == fp::bits(b); }

// Bitwise equality, except that any two NaNs compare equal.
inline bool same_value(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return same_bits(a, b);
}

// A random finite double from a random bit pattern.
inline double random_finite(SplitMix64& g) {
  for (;;) {
    const double x = fp::from_bits(g());
    if (std::isfinite(x)) return x;
  }
}

// Uniform in [-1, 1).
inline double random_unit(SplitMix64& g) {
  return static_cast<double>(static_cast<std::int64_t>(g())) * 0x1p-63;
}

}  // namespace jsvd::test
