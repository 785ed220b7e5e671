#pragma once
// Frobenius norms in the (e, f) representation 2^e * f, 1 <= f < 2, with
// zero stored as (-inf, 1). The exponent is an integral double, so the
// squared norm of any reasonably long finite vector is representable.

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "jsvd/lanes.hpp"

namespace jsvd {

struct SplitMatrix;

struct EFNumber {
  double e = -FloatEnv::inf;
  double f = 1.0;

  static EFNumber from_double(double x) { return {fp::getexp(x), fp::getmant(x)}; }
  // fl(2^e f); overflows to inf or underflows as scalef does.
  double to_double() const { return fp::scalef(f, e); }
  bool is_zero() const { return e == -FloatEnv::inf; }
  bool finite() const { return e == e && e != FloatEnv::inf && f == f; }
};

// Lexicographic order on (e, f).
inline bool ef_le(const EFNumber& a, const EFNumber& b) {
  return a.e < b.e || (a.e == b.e && a.f <= b.f);
}
inline bool operator==(const EFNumber& a, const EFNumber& b) {
  return fp::bits(a.e) == fp::bits(b.e) && fp::bits(a.f) == fp::bits(b.f);
}

// (e, f') with f' unnormalized and finite -> normalized.
inline EFNumber ef_normalize(double e, double f) { return {e + fp::getexp(f), fp::getmant(f)}; }

// a + b; the smaller operand is scaled onto the larger one's exponent.
inline EFNumber ef_add(EFNumber a, EFNumber b) {
  if (!ef_le(a, b)) std::swap(a, b);
  const double d = fp::vmax(a.e - b.e, -FloatEnv::inf);
  return ef_normalize(b.e, fp::fmadd(fp::scalef(1.0, d), a.f, b.f));
}

inline EFNumber ef_sqrt(EFNumber x) {
  const double l = fp::lsb(x.e);
  const double e = x.e - l;
  const double f = fp::scalef(x.f, l);
  return {fp::scalef(e, -1.0), std::sqrt(f)};
}

// sqrt(a^2 + b^2) for nonnegative EF magnitudes.
inline EFNumber ef_hypot(EFNumber a, EFNumber b) {
  const double E = fp::vmax(a.e, b.e);
  const double fa = fp::scalef(a.f, fp::vmax(a.e - E, -FloatEnv::inf));
  const double fb = fp::scalef(b.f, fp::vmax(b.e - E, -FloatEnv::inf));
  return ef_normalize(E, fp::naive_hypot(fa, fb));
}

// Bitonic network stage: lane l is compared with lane l ^ partner, and lanes
// whose bit is set in `upper` keep the larger element.
struct BitonicStage {
  int partner;
  LaneMask upper;
};

constexpr int bitonic_stage_count(int s) {
  int k = 0;
  while ((1 << k) < s) ++k;
  return k * (k + 1) / 2;
}

template <int S>
constexpr std::array<BitonicStage, bitonic_stage_count(S)> bitonic_stages() {
  std::array<BitonicStage, bitonic_stage_count(S)> st{};
  int n = 0;
  auto lanes_with_bit = [](int b) {
    LaneMask m = 0;
    for (int l = 0; l < S; ++l)
      if (l & b) m |= LaneMask(1) << l;
    return m;
  };
  for (int k = 2; k <= S; k *= 2) {
    st[n++] = {k - 1, lanes_with_bit(k / 2)};
    for (int j = k / 4; j >= 1; j /= 2) st[n++] = {j, lanes_with_bit(j)};
  }
  return st;
}

// Permutation vectors (lane l reads lane idx[l]) and masks for width s.
std::vector<std::pair<std::vector<int>, LaneMask>> bitonic_network(int s);

namespace kern {

template <class B>
struct EFVec {
  typename B::vec e, f;
};

template <class B>
EFVec<B> bitonic_sort_ef(EFVec<B> v) {
  constexpr int S = B::width;
  static constexpr auto stages = bitonic_stages<S>();
  struct Idx {
    alignas(64) std::int64_t v[S];
  };
  static const auto idx = [] {
    std::array<Idx, stages.size()> t{};
    for (std::size_t k = 0; k < stages.size(); ++k)
      for (int l = 0; l < S; ++l) t[k].v[l] = l ^ stages[k].partner;
    return t;
  }();
  for (std::size_t k = 0; k < stages.size(); ++k) {
    const auto ep = B::permute(idx[k].v, v.e);
    const auto fp_ = B::permute(idx[k].v, v.f);
    const LaneMask le = B::cmp_lt(v.e, ep) | (B::cmp_eq(v.e, ep) & B::cmp_le(v.f, fp_));
    const auto elo = B::blend(le, ep, v.e), ehi = B::blend(le, v.e, ep);
    const auto flo = B::blend(le, fp_, v.f), fhi = B::blend(le, v.f, fp_);
    v.e = B::blend(stages[k].upper, elo, ehi);
    v.f = B::blend(stages[k].upper, flo, fhi);
  }
  return v;
}

// Sequential left-to-right reduction of the lanes (the default).
template <class B>
EFNumber reduce_sequential(const EFVec<B>& v) {
  alignas(64) double e[B::width], f[B::width];
  B::store(e, v.e);
  B::store(f, v.f);
  EFNumber acc{e[0], f[0]};
  for (int l = 1; l < B::width; ++l) acc = ef_add(acc, EFNumber{e[l], f[l]});
  return acc;
}

// Vectorized pairwise reduction of sorted lanes via compress.
template <class B>
EFNumber reduce_pairwise(EFVec<B> v) {
  LaneMask odd = 0;
  for (int l = 0; l < B::width; l += 2) odd |= LaneMask(1) << l;
  LaneMask even = odd << 1;
  for (int w = B::width; w > 1; w /= 2) {
    const auto ae = B::compress(odd, v.e), af = B::compress(odd, v.f);
    const auto be = B::compress(even, v.e), bf = B::compress(even, v.f);
    const auto d = B::max(B::sub(ae, be), B::set1(-FloatEnv::inf));
    const auto f1 = B::fmadd(B::scalef(B::set1(1.0), d), af, bf);
    v.f = B::getmant(f1);
    v.e = B::add(be, B::getexp(f1));
    odd >>= w / 2;
    even >>= w / 2;
  }
  return {B::lane(v.e, 0), B::lane(v.f, 0)};
}

// Lane-wise partial sums of squares of x[0..len), len a multiple of the width.
template <class B>
EFVec<B> sumsq_partials(const double* x, std::size_t len) {
  using V = typename B::vec;
  const V one = B::set1(1.0), none = B::set1(-1.0), ninf = B::set1(-FloatEnv::inf);
  V e = ninf, f = one;
  for (std::size_t i = 0; i < len; i += B::width) {
    const V xi = B::load(x + i);
    const V lsb = B::lsb(e);
    const V e1 = B::sub(e, lsb);
    const V f1 = B::scalef(f, lsb);
    const V ex = B::getexp(xi), fx = B::getmant(xi);
    const V eh = B::scalef(ex, one);
    const V emax = B::max(eh, e1);
    const V eh1 = B::max(B::sub(eh, emax), ninf);
    const V e2 = B::max(B::sub(e1, emax), ninf);
    const V eh2 = B::scalef(eh1, none);
    const V fh = B::scalef(fx, eh2);
    const V fh1 = B::scalef(f1, e2);
    const V fn = B::fmadd(fh, fh, fh1);
    f = B::getmant(fn);
    e = B::add(emax, B::getexp(fn));
  }
  return {e, f};
}

enum class Reduction { sequential, pairwise };

// Squared norm, sorted then reduced.
template <class B>
EFNumber frob_sq_ef(const double* x, std::size_t len, Reduction red = Reduction::sequential) {
  const EFVec<B> sorted = bitonic_sort_ef<B>(sumsq_partials<B>(x, len));
  return red == Reduction::sequential ? reduce_sequential<B>(sorted) : reduce_pairwise<B>(sorted);
}

template <class B>
EFNumber frob_norm_ef(const double* x, std::size_t len, Reduction red = Reduction::sequential) {
  return ef_sqrt(frob_sq_ef<B>(x, len, red));
}

template <class B>
EFNumber frob_norm_complex(const double* re, const double* im, std::size_t len) {
  const EFNumber a = frob_norm_ef<B>(re, len);
  if (!im) return a;
  return ef_hypot(a, frob_norm_ef<B>(im, len));
}

// max |x_i| with NaN mapped to inf.
template <class B>
double max_abs(const double* x, std::size_t len) {
  auto acc = B::zero();
  const auto inf = B::set1(FloatEnv::inf);
  for (std::size_t i = 0; i < len; i += B::width)
    acc = B::max(acc, B::min(B::abs(B::load(x + i)), inf));
  return B::reduce_max(acc);
}

}  // namespace kern

// Native-backend entry points. The length must be a multiple of 8 (padded
// columns); non-finite input throws std::invalid_argument.
EFNumber frob_norm_ef(const double* x, std::size_t len);
EFNumber frob_norm_complex(const double* re, const double* im, std::size_t len);
double max_norm(const SplitMatrix& x);

}  // namespace jsvd
