#pragma once
// Lane-vector layer. Two backends share one static interface:
//   Emu<S>  - plain loops over S doubles, any power-of-two S
//   Avx512  - __m512d, S = 8, only when the compiler targets AVX-512F/DQ
// Every operation is total over all bit patterns and follows the AVX-512
// instruction semantics the kernels rely on (getexp(0) = -inf, getmant in
// [1,2), scalef with floor(e), min/max returning the second operand).

#include <bit>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <limits>

#if defined(__AVX512F__) && defined(__AVX512DQ__)
#include <immintrin.h>
#define JSVD_HAVE_AVX512 1
#else
#define JSVD_HAVE_AVX512 0
#endif

namespace jsvd {

using LaneMask = std::uint32_t;

struct FloatEnv {
  static constexpr double omega = DBL_MAX;
  static constexpr double sqrt_omega = 1.34078079299425956E+154;
  static constexpr double mu_check = DBL_TRUE_MIN;
  static constexpr double eps = 0x1p-53;
  static constexpr double eta = 1020.0;
  static constexpr double eta_hat = 1023.0;
  static constexpr int p = 52;
  static constexpr double inf = std::numeric_limits<double>::infinity();
};

namespace fp {

inline std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }
inline double from_bits(std::uint64_t b) { return std::bit_cast<double>(b); }

inline constexpr std::uint64_t kSign = 0x8000000000000000ull;
inline constexpr std::uint64_t kQuiet = 0x0008000000000000ull;
// The x86 "QNaN floating-point indefinite".
inline constexpr std::uint64_t kDefaultNaN = 0xFFF8000000000000ull;

inline bool is_nan(double x) { return x != x; }
inline double quiet(double x) { return from_bits(bits(x) | kQuiet); }

inline double vmin(double a, double b) { return a < b ? a : b; }
inline double vmax(double a, double b) { return a > b ? a : b; }

inline double abs(double x) { return from_bits(bits(x) & ~kSign); }
inline double sign(double x) { return from_bits(bits(x) & kSign); }
inline double or_(double x, double y) { return from_bits(bits(x) | bits(y)); }
inline double and_(double x, double y) { return from_bits(bits(x) & bits(y)); }
inline double xor_(double x, double y) { return from_bits(bits(x) ^ bits(y)); }
// ~x & y
inline double andnot(double x, double y) { return from_bits(~bits(x) & bits(y)); }

inline double getexp(double x) {
  if (is_nan(x)) return quiet(x);
  if (x == 0) return -FloatEnv::inf;
  if (std::isinf(x)) return FloatEnv::inf;
  return static_cast<double>(std::ilogb(x));
}

// Significand in [1,2), sign cleared. getmant(0) = getmant(inf) = 1.
inline double getmant(double x) {
  if (is_nan(x)) return quiet(x);
  if (x == 0 || std::isinf(x)) return 1.0;
  int e;
  double m = std::frexp(abs(x), &e);
  return 2 * m;
}

inline double scalef(double x, double e) {
  if (is_nan(x)) {
    // A quiet NaN scaled by an infinite exponent gives +inf or +0 (the
    // hardware special-case table); a signaling one stays NaN.
    const bool qnan = (bits(x) & kQuiet) != 0;
    if (qnan && e == FloatEnv::inf) return FloatEnv::inf;
    if (qnan && e == -FloatEnv::inf) return 0.0;
    return quiet(x);
  }
  if (is_nan(e)) return quiet(e);
  if (x == 0) return e == FloatEnv::inf ? from_bits(kDefaultNaN) : x;
  if (std::isinf(x)) return e == -FloatEnv::inf ? from_bits(kDefaultNaN) : x;
  if (e == FloatEnv::inf) return std::copysign(FloatEnv::inf, x);
  if (e == -FloatEnv::inf) return std::copysign(0.0, x);
  double k = std::floor(e);
  k = k < -2200 ? -2200 : (k > 2200 ? 2200 : k);
  return std::ldexp(x, static_cast<int>(k));
}

inline double fmadd(double a, double b, double c) { return std::fma(a, b, c); }
inline double fmsub(double a, double b, double c) { return std::fma(a, b, -c); }
inline double fnmadd(double a, double b, double c) { return std::fma(-a, b, c); }

// vcvtpd2qq: round to nearest even, out of range and NaN give INT64_MIN.
inline std::int64_t cvt_i64(double x) {
  if (!(x >= -0x1p63 && x < 0x1p63)) return std::numeric_limits<std::int64_t>::min();
  return static_cast<std::int64_t>(std::nearbyint(x));
}

// Lowest bit of an integral exponent as 0.0 or 1.0 (-inf maps to 0).
inline double lsb(double e) { return static_cast<double>(cvt_i64(e) & 1); }

// x / |z| style naive hypot of the paper: sqrt(q*q + 1) * M.
inline double naive_hypot(double x, double y) {
  double ax = abs(x), ay = abs(y);
  double m = vmin(ax, ay), M = vmax(ax, ay);
  double q = vmax(m / M, 0.0);
  return std::sqrt(fmadd(q, q, 1.0)) * M;
}

}  // namespace fp

namespace lanes {

// Scalar emulation. Each member mirrors one AVX-512 instruction.
template <int S>
struct Emu {
  static_assert(S >= 1 && (S & (S - 1)) == 0, "lane count must be a power of two");
  static constexpr int width = S;
  struct vec {
    double v[S];
  };

  static vec load(const double* p) {
    vec r;
    for (int l = 0; l < S; ++l) r.v[l] = p[l];
    return r;
  }
  static void store(double* p, const vec& x) {
    for (int l = 0; l < S; ++l) p[l] = x.v[l];
  }
  static vec set1(double a) {
    vec r;
    for (int l = 0; l < S; ++l) r.v[l] = a;
    return r;
  }
  static vec zero() { return set1(0.0); }

#define JSVD_EMU_UNARY(name, expr)            \
  static vec name(const vec& x) {             \
    vec r;                                    \
    for (int l = 0; l < S; ++l) {             \
      const double a = x.v[l];                \
      r.v[l] = (expr);                        \
    }                                         \
    return r;                                 \
  }
#define JSVD_EMU_BINARY(name, expr)           \
  static vec name(const vec& x, const vec& y) { \
    vec r;                                    \
    for (int l = 0; l < S; ++l) {             \
      const double a = x.v[l], b = y.v[l];    \
      r.v[l] = (expr);                        \
    }                                         \
    return r;                                 \
  }
#define JSVD_EMU_TERNARY(name, expr)                        \
  static vec name(const vec& x, const vec& y, const vec& z) { \
    vec r;                                                  \
    for (int l = 0; l < S; ++l) {                           \
      const double a = x.v[l], b = y.v[l], c = z.v[l];      \
      r.v[l] = (expr);                                      \
    }                                                       \
    return r;                                               \
  }

  JSVD_EMU_BINARY(add, a + b)
  JSVD_EMU_BINARY(sub, a - b)
  JSVD_EMU_BINARY(mul, a * b)
  JSVD_EMU_BINARY(div, a / b)
  JSVD_EMU_UNARY(sqrt, std::sqrt(a))
  JSVD_EMU_TERNARY(fmadd, fp::fmadd(a, b, c))
  JSVD_EMU_TERNARY(fmsub, fp::fmsub(a, b, c))
  JSVD_EMU_TERNARY(fnmadd, fp::fnmadd(a, b, c))
  JSVD_EMU_BINARY(min, fp::vmin(a, b))
  JSVD_EMU_BINARY(max, fp::vmax(a, b))
  JSVD_EMU_BINARY(scalef, fp::scalef(a, b))
  JSVD_EMU_UNARY(getexp, fp::getexp(a))
  JSVD_EMU_UNARY(getmant, fp::getmant(a))
  JSVD_EMU_UNARY(abs, fp::abs(a))
  JSVD_EMU_UNARY(sign, fp::sign(a))
  JSVD_EMU_UNARY(lsb, fp::lsb(a))
  JSVD_EMU_BINARY(or_, fp::or_(a, b))
  JSVD_EMU_BINARY(and_, fp::and_(a, b))
  JSVD_EMU_BINARY(xor_, fp::xor_(a, b))
  JSVD_EMU_BINARY(andnot, fp::andnot(a, b))

#undef JSVD_EMU_UNARY
#undef JSVD_EMU_BINARY
#undef JSVD_EMU_TERNARY

  static LaneMask cmp_lt(const vec& x, const vec& y) {
    LaneMask m = 0;
    for (int l = 0; l < S; ++l) m |= LaneMask(x.v[l] < y.v[l]) << l;
    return m;
  }
  static LaneMask cmp_le(const vec& x, const vec& y) {
    LaneMask m = 0;
    for (int l = 0; l < S; ++l) m |= LaneMask(x.v[l] <= y.v[l]) << l;
    return m;
  }
  static LaneMask cmp_eq(const vec& x, const vec& y) {
    LaneMask m = 0;
    for (int l = 0; l < S; ++l) m |= LaneMask(x.v[l] == y.v[l]) << l;
    return m;
  }
  // Lanes with a set bit take b, the rest take a.
  static vec blend(LaneMask m, const vec& a, const vec& b) {
    vec r;
    for (int l = 0; l < S; ++l) r.v[l] = (m >> l & 1) ? b.v[l] : a.v[l];
    return r;
  }
  static vec compress(LaneMask m, const vec& x) {
    vec r = zero();
    int k = 0;
    for (int l = 0; l < S; ++l)
      if (m >> l & 1) r.v[k++] = x.v[l];
    return r;
  }
  // r[l] = x[idx[l]]
  static vec permute(const std::int64_t* idx, const vec& x) {
    vec r;
    for (int l = 0; l < S; ++l) r.v[l] = x.v[idx[l] & (S - 1)];
    return r;
  }
  static double reduce_add(const vec& x) {
    double s = x.v[0];
    for (int l = 1; l < S; ++l) s += x.v[l];
    return s;
  }
  static double reduce_max(const vec& x) {
    double s = x.v[0];
    for (int l = 1; l < S; ++l) s = fp::vmax(x.v[l], s);
    return s;
  }
  static double lane(const vec& x, int l) { return x.v[l]; }
};

#if JSVD_HAVE_AVX512
struct Avx512 {
  static constexpr int width = 8;
  using vec = __m512d;

  static vec load(const double* p) { return _mm512_loadu_pd(p); }
  static void store(double* p, vec x) { _mm512_storeu_pd(p, x); }
  static vec set1(double a) { return _mm512_set1_pd(a); }
  static vec zero() { return _mm512_setzero_pd(); }

  static vec add(vec a, vec b) { return _mm512_add_pd(a, b); }
  static vec sub(vec a, vec b) { return _mm512_sub_pd(a, b); }
  static vec mul(vec a, vec b) { return _mm512_mul_pd(a, b); }
  static vec div(vec a, vec b) { return _mm512_div_pd(a, b); }
  static vec sqrt(vec a) { return _mm512_sqrt_pd(a); }
  static vec fmadd(vec a, vec b, vec c) { return _mm512_fmadd_pd(a, b, c); }
  static vec fmsub(vec a, vec b, vec c) { return _mm512_fmsub_pd(a, b, c); }
  static vec fnmadd(vec a, vec b, vec c) { return _mm512_fnmadd_pd(a, b, c); }
  static vec min(vec a, vec b) { return _mm512_min_pd(a, b); }
  static vec max(vec a, vec b) { return _mm512_max_pd(a, b); }
  static vec scalef(vec x, vec e) { return _mm512_scalef_pd(x, e); }
  static vec getexp(vec x) { return _mm512_getexp_pd(x); }
  static vec getmant(vec x) { return _mm512_getmant_pd(x, _MM_MANT_NORM_1_2, _MM_MANT_SIGN_zero); }
  static vec abs(vec x) { return _mm512_andnot_pd(_mm512_set1_pd(-0.0), x); }
  static vec sign(vec x) { return _mm512_and_pd(_mm512_set1_pd(-0.0), x); }
  static vec lsb(vec e) {
    __m512i k = _mm512_and_epi64(_mm512_cvtpd_epi64(e), _mm512_set1_epi64(1));
    return _mm512_cvtepi64_pd(k);
  }
  static vec or_(vec a, vec b) { return _mm512_or_pd(a, b); }
  static vec and_(vec a, vec b) { return _mm512_and_pd(a, b); }
  static vec xor_(vec a, vec b) { return _mm512_xor_pd(a, b); }
  static vec andnot(vec a, vec b) { return _mm512_andnot_pd(a, b); }

  static LaneMask cmp_lt(vec a, vec b) { return _mm512_cmp_pd_mask(a, b, _CMP_LT_OS); }
  static LaneMask cmp_le(vec a, vec b) { return _mm512_cmp_pd_mask(a, b, _CMP_LE_OS); }
  static LaneMask cmp_eq(vec a, vec b) { return _mm512_cmp_pd_mask(a, b, _CMP_EQ_OQ); }
  static vec blend(LaneMask m, vec a, vec b) { return _mm512_mask_blend_pd(__mmask8(m), a, b); }
  static vec compress(LaneMask m, vec x) { return _mm512_maskz_compress_pd(__mmask8(m), x); }
  static vec permute(const std::int64_t* idx, vec x) {
    return _mm512_permutexvar_pd(_mm512_loadu_si512(idx), x);
  }
  static double reduce_add(vec x) {
    alignas(64) double t[8];
    _mm512_store_pd(t, x);
    double s = t[0];
    for (int l = 1; l < 8; ++l) s += t[l];
    return s;
  }
  static double reduce_max(vec x) {
    alignas(64) double t[8];
    _mm512_store_pd(t, x);
    double s = t[0];
    for (int l = 1; l < 8; ++l) s = fp::vmax(t[l], s);
    return s;
  }
  static double lane(vec x, int l) {
    alignas(64) double t[8];
    _mm512_store_pd(t, x);
    return t[l];
  }
};
using Native = Avx512;
#else
using Native = Emu<8>;
#endif

}  // namespace lanes

}  // namespace jsvd
