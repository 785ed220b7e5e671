#pragma once
// Per-step building blocks of the one-sided Jacobi SVD: scaled dot
// products, the convergence test, Grammian formation, column rotations and
// the real Gram-Schmidt fallback. Columns are padded to a multiple of the
// lane count; complex columns are given as separate re/im planes.

#include <bit>
#include <cstddef>
#include <utility>

#include "jsvd/efnorm.hpp"
#include "jsvd/evd2.hpp"
#include "jsvd/lanes.hpp"

namespace jsvd {

struct ScaledDot {
  double re = 0.0;
  double im = 0.0;
};

struct RotationParams {
  double cos_phi = 1.0;
  double ca_tan = 0.0;  // real case: sign(a21) tan(phi)
  double sa_tan = 0.0;
  bool swap = false;
};

namespace kern {

// fl(conj(gq/|gq|) . gp/|gp|); gq_im/gp_im may be null for real columns.
template <class B>
ScaledDot zdpscl(const double* gq_re, const double* gq_im, const double* gp_re, const double* gp_im,
                 std::size_t len, const EFNumber& nq, const EFNumber& np) {
  using V = typename B::vec;
  const V meq = B::set1(-nq.e), mep = B::set1(-np.e);
  V zr = B::zero(), zi = B::zero();
  for (std::size_t i = 0; i < len; i += B::width) {
    const V rq = B::scalef(B::load(gq_re + i), meq);
    const V iq = B::scalef(B::load(gq_im + i), meq);
    const V rp = B::scalef(B::load(gp_re + i), mep);
    const V ip = B::scalef(B::load(gp_im + i), mep);
    zr = B::fmadd(rq, rp, zr);
    zi = B::fmadd(rq, ip, zi);
    zr = B::fmadd(iq, ip, zr);
    zi = B::fnmadd(iq, rp, zi);
  }
  const double d = nq.f * np.f;
  return {B::reduce_add(zr) / d, B::reduce_add(zi) / d};
}

template <class B>
double ddpscl(const double* gq, const double* gp, std::size_t len, const EFNumber& nq,
              const EFNumber& np) {
  using V = typename B::vec;
  const V meq = B::set1(-nq.e), mep = B::set1(-np.e);
  V z = B::zero();
  for (std::size_t i = 0; i < len; i += B::width)
    z = B::fmadd(B::scalef(B::load(gq + i), meq), B::scalef(B::load(gp + i), mep), z);
  return B::reduce_add(z) / (nq.f * np.f);
}

// Bit l set iff upsilon <= |a21'| (the pair needs a transformation).
template <class B>
LaneMask check_convergence(typename B::vec re, typename B::vec im, double upsilon) {
  return B::cmp_le(B::set1(upsilon), naive_hypot<B>(re, im));
}

template <class B>
LaneMask check_convergence(typename B::vec re, double upsilon) {
  return B::cmp_le(B::set1(upsilon), B::abs(re));
}

template <class B>
struct Grammian {
  typename B::vec a11, a22, re, im;
};

// Index 1 is the p column, index 2 the q column.
template <class B>
Grammian<B> form_grammians(typename B::vec re, typename B::vec im, typename B::vec e1,
                           typename B::vec f1, typename B::vec e2, typename B::vec f2) {
  auto f12 = B::div(f1, f2);
  auto e12 = B::sub(e1, e2);
  auto f21 = B::div(f2, f1);
  auto e21 = B::sub(e2, e1);
  e12 = B::add(e12, B::getexp(f12));
  f12 = B::getmant(f12);
  e21 = B::add(e21, B::getexp(f21));
  f21 = B::getmant(f21);
  const auto sA = B::min(B::sub(B::set1(FloatEnv::eta_hat), B::max(e12, e21)), B::zero());
  e12 = B::add(e12, sA);
  e21 = B::add(e21, sA);
  return {B::scalef(f12, e12), B::scalef(f21, e21), B::scalef(re, sA), B::scalef(im, sA)};
}

// [xp xq] <- [xp xq] U(alpha, phi) P. Returns the max |component| written.
template <class B>
double zjrot(double* xp_re, double* xp_im, double* xq_re, double* xq_im, std::size_t len,
             const RotationParams& r) {
  using V = typename B::vec;
  double* dp_re = r.swap ? xq_re : xp_re;
  double* dp_im = r.swap ? xq_im : xp_im;
  double* dq_re = r.swap ? xp_re : xq_re;
  double* dq_im = r.swap ? xp_im : xq_im;
  const V C = B::set1(r.ca_tan), S = B::set1(r.sa_tan), c = B::set1(r.cos_phi);
  const V mC = B::set1(-r.ca_tan);
  V M = B::zero();
  auto amax = [](V a, V b) { return B::max(B::abs(a), B::abs(b)); };

  if (r.sa_tan == 0.0) {
    // Real rotation applied to the re and im planes separately.
    const bool unit = r.cos_phi == 1.0;
    for (std::size_t i = 0; i < len; i += B::width) {
      const V rp = B::load(xp_re + i), ip = B::load(xp_im + i);
      const V rq = B::load(xq_re + i), iq = B::load(xq_im + i);
      V rp1 = B::fmadd(rq, C, rp), ip1 = B::fmadd(iq, C, ip);
      V rq1 = B::fmadd(rp, mC, rq), iq1 = B::fmadd(ip, mC, iq);
      if (!unit) {
        rp1 = B::mul(rp1, c);
        ip1 = B::mul(ip1, c);
        rq1 = B::mul(rq1, c);
        iq1 = B::mul(iq1, c);
      }
      B::store(dp_re + i, rp1);
      B::store(dp_im + i, ip1);
      M = B::max(M, amax(rp1, ip1));
      B::store(dq_re + i, rq1);
      B::store(dq_im + i, iq1);
      M = B::max(M, amax(rq1, iq1));
    }
    return B::reduce_max(M);
  }

  auto loop = [&](auto scale) {
    for (std::size_t i = 0; i < len; i += B::width) {
      const V rp = B::load(xp_re + i), ip = B::load(xp_im + i);
      const V rq = B::load(xq_re + i), iq = B::load(xq_im + i);
      const V rp1 = scale(B::fmadd(rq, C, B::fnmadd(iq, S, rp)));
      const V ip1 = scale(B::fmadd(rq, S, B::fmadd(iq, C, ip)));
      B::store(dp_re + i, rp1);
      B::store(dp_im + i, ip1);
      M = B::max(M, amax(rp1, ip1));
      const V rq1 = scale(B::fmadd(rp, mC, B::fnmadd(ip, S, rq)));
      const V iq1 = scale(B::fmadd(rp, S, B::fmadd(ip, mC, iq)));
      B::store(dq_re + i, rq1);
      B::store(dq_im + i, iq1);
      M = B::max(M, amax(rq1, iq1));
    }
  };
  if (r.cos_phi == 1.0)
    loop([](V x) { return x; });
  else
    loop([&](V x) { return B::mul(x, c); });
  return B::reduce_max(M);
}

// Real rotation: xp' = fma(xq, T, xp) c, xq' = fma(xp, -T, xq) c.
template <class B>
double djrot(double* xp, double* xq, std::size_t len, const RotationParams& r) {
  using V = typename B::vec;
  double* dp = r.swap ? xq : xp;
  double* dq = r.swap ? xp : xq;
  const V T = B::set1(r.ca_tan), mT = B::set1(-r.ca_tan), c = B::set1(r.cos_phi);
  V M = B::zero();
  auto loop = [&](auto scale) {
    for (std::size_t i = 0; i < len; i += B::width) {
      const V p = B::load(xp + i), q = B::load(xq + i);
      const V p1 = scale(B::fmadd(q, T, p));
      const V q1 = scale(B::fmadd(p, mT, q));
      B::store(dp + i, p1);
      B::store(dq + i, q1);
      M = B::max(M, B::max(B::abs(p1), B::abs(q1)));
    }
  };
  if (r.cos_phi == 1.0)
    loop([](V x) { return x; });
  else
    loop([&](V x) { return B::mul(x, c); });
  return B::reduce_max(M);
}

// Swap two columns without transforming them.
inline void swap_columns(double* a, double* b, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) std::swap(a[i], b[i]);
}

// gq <- (gq/2^eq - psi gp/2^ep) 2^eq with psi = a21' (fq/fp).
// Returns the max |element| over both columns.
template <class B>
double gram_schmidt_real(double* gq, const double* gp, std::size_t len, double a21p,
                         const EFNumber& nq, const EFNumber& np) {
  using V = typename B::vec;
  const V eq = B::set1(nq.e), mep = B::set1(-np.e), meq = B::set1(-nq.e);
  const V mpsi = B::set1(-(a21p * (nq.f / np.f)));
  V M = B::zero();
  for (std::size_t i = 0; i < len; i += B::width) {
    const V x = B::scalef(B::load(gp + i), mep);
    const V y = B::scalef(B::load(gq + i), meq);
    const V y1 = B::scalef(B::fmadd(mpsi, x, y), eq);
    B::store(gq + i, y1);
    M = B::max(M, B::max(B::abs(B::load(gp + i)), B::abs(y1)));
  }
  return B::reduce_max(M);
}

}  // namespace kern

// True iff |gp| > 2^eta_hat * upsilon * |gq| (strict; ties rotate).
inline bool gs_trigger(const EFNumber& np, const EFNumber& nq, double upsilon) {
  if (nq.is_zero()) return false;
  const double r = upsilon * nq.f;
  const EFNumber rhs{nq.e + FloatEnv::eta_hat + fp::getexp(r), fp::getmant(r)};
  return !ef_le(np, rhs);
}

}  // namespace jsvd
