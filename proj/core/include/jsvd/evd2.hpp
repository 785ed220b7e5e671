#pragma once
// Branch-free eigendecomposition of batches of 2x2 Hermitian (complex) and
// symmetric (real) matrices. Only the lower triangle is stored:
//   A = [a11  conj(a21)]
//       [a21  a22      ]
// and the result is A = U diag(l1, l2) U^* with
//   U = [cos(phi)                 -exp(-i alpha) sin(phi)]
//       [exp(i alpha) sin(phi)     cos(phi)              ]
// kept in the factored form (cos phi, cos(alpha) tan(phi), sin(alpha) tan(phi)).

#include <cstddef>
#include <string>
#include <vector>

#include "jsvd/aligned.hpp"
#include "jsvd/lanes.hpp"

namespace jsvd {

struct HermBatch2 {
  std::size_t r = 0;
  std::size_t r_tilde = 0;
  std::size_t s = 8;
  bool complex = true;
  AlignedVec a11, a22, re_a21, im_a21;

  static HermBatch2 make(std::size_t r, bool complex, std::size_t s = 8);
  // Throws std::invalid_argument on NaN or infinity in the logical part.
  void require_finite() const;
};

struct EVDOut2 {
  std::size_t r = 0;
  std::size_t r_tilde = 0;
  std::size_t s = 8;
  bool complex = true;
  // For real batches ca_tan holds sign(a21)*tan(phi) and sa_tan is empty.
  AlignedVec cos_phi, ca_tan, sa_tan, lambda1, lambda2;
  std::vector<LaneMask> perm;  // one word per chunk
  AlignedVec neg_zeta;         // only with defer_backscale
  AlignedVec sin_re, sin_im;   // only with want_sines: exp(i alpha) sin(phi)

  static EVDOut2 make(std::size_t r, bool complex, std::size_t s, bool deferred, bool sines);
  bool perm_bit(std::size_t j) const { return (perm[j / s] >> (j % s)) & 1u; }
};

struct Evd2Options {
  bool defer_backscale = false;
  bool want_sines = false;
  unsigned workers = 1;
  const std::vector<LaneMask>* skip = nullptr;  // chunk c is skipped when (*skip)[c] == 0
};

EVDOut2 evd2_batch(const HermBatch2& batch, const Evd2Options& opt = {});
// Same, writing into a preallocated output (chunks skipped are left untouched).
void evd2_batch_into(const HermBatch2& batch, EVDOut2& out, const Evd2Options& opt = {});

// Batch format: "JSVDB2X2", u64 r, u32 s, u32 flags, then a11, a22, re_a21
// and (complex) im_a21, each r_tilde doubles.
void write_batch(const std::string& path, const HermBatch2& b);
HermBatch2 read_batch(const std::string& path);
// Output format: "JSVDEVD2", u64 r, u32 s, u32 flags, then cos_phi, ca_tan,
// (complex) sa_tan, lambda1, lambda2, then ceil(s/8) bytes of perm per chunk.
void write_evd(const std::string& path, const EVDOut2& o);
EVDOut2 read_evd(const std::string& path);

namespace kern {

template <class B>
struct Polar {
  typename B::vec cos_alpha, sin_alpha, modulus;
};

template <class B>
struct Angles {
  typename B::vec tan_phi, sec_phi, sec2_phi, cos_phi;
};

template <class B>
struct Eigs {
  typename B::vec l1, l2;
};

// zeta = min(omega, eta - floor(lg|a_ij|)), floor(lg 0) = -inf.
template <class B>
typename B::vec scale_exponent(typename B::vec a11, typename B::vec a22, typename B::vec re,
                               typename B::vec im) {
  const auto eta = B::set1(FloatEnv::eta);
  const auto z11 = B::sub(eta, B::getexp(a11));
  const auto z22 = B::sub(eta, B::getexp(a22));
  const auto zre = B::sub(eta, B::getexp(re));
  const auto zim = B::sub(eta, B::getexp(im));
  return B::min(B::set1(FloatEnv::omega), B::min(B::min(z11, z22), B::min(zre, zim)));
}

template <class B>
typename B::vec scale_exponent(typename B::vec a11, typename B::vec a22, typename B::vec a21) {
  const auto eta = B::set1(FloatEnv::eta);
  const auto z11 = B::sub(eta, B::getexp(a11));
  const auto z22 = B::sub(eta, B::getexp(a22));
  const auto z21 = B::sub(eta, B::getexp(a21));
  return B::min(B::min(z11, z22), B::min(z21, B::set1(FloatEnv::omega)));
}

// M * sqrt(q*q + 1), q = m/M with 0/0 filtered to 0.
template <class B>
typename B::vec naive_hypot(typename B::vec x, typename B::vec y) {
  const auto ax = B::abs(x), ay = B::abs(y);
  const auto m = B::min(ax, ay), M = B::max(ax, ay);
  const auto q = B::max(B::div(m, M), B::zero());
  return B::mul(B::sqrt(B::fmadd(q, q, B::set1(1.0))), M);
}

template <class B>
Polar<B> polar2(typename B::vec re, typename B::vec im) {
  const auto are = B::abs(re);
  const auto aim = B::abs(im);
  const auto sre = B::sign(re);
  const auto mod = naive_hypot<B>(are, aim);
  // min turns 0/0 into 1, max turns a zero modulus into the least subnormal.
  const auto ca = B::or_(B::min(B::div(are, mod), B::set1(1.0)), sre);
  const auto sa = B::div(im, B::max(mod, B::set1(FloatEnv::mu_check)));
  return {ca, sa, mod};
}

// o = 2|a21|.
template <class B>
Angles<B> jacobi_angles(typename B::vec a11, typename B::vec a22, typename B::vec o) {
  const auto one = B::set1(1.0);
  const auto a = B::sub(a11, a22);
  const auto aa = B::abs(a);
  const auto sa = B::sign(a);
  const auto tan2 =
      B::or_(B::min(B::max(B::div(o, aa), B::zero()), B::set1(FloatEnv::sqrt_omega)), sa);
  const auto sec2_2 = B::fmadd(tan2, tan2, one);
  const auto t = B::div(tan2, B::add(one, B::sqrt(sec2_2)));
  const auto sec2 = B::fmadd(t, t, one);
  const auto sec = B::sqrt(sec2);
  const auto c = B::div(one, sec);
  return {t, sec, sec2, c};
}

template <class B>
Eigs<B> eigenvalues2(typename B::vec a11, typename B::vec a22, typename B::vec o,
                     typename B::vec t, typename B::vec sec2) {
  const auto l1 = B::div(B::fmadd(t, B::fmadd(a22, t, o), a11), sec2);
  const auto l2 = B::div(B::fmadd(t, B::fmsub(a11, t, o), a22), sec2);
  return {l1, l2};
}

struct Batch2Ptrs {
  const double *a11, *a22, *re, *im;
};
struct Evd2Ptrs {
  double *cos_phi, *ca_tan, *sa_tan, *l1, *l2;
  LaneMask* perm;     // perm word of this chunk
  double* neg_zeta;   // non-null: store -zeta and leave eigenvalues scaled
  double *sin_re, *sin_im;  // optional
};

// One chunk of B::width complex matrices starting at offset i.
template <class B>
void zjac2(std::size_t i, const Batch2Ptrs& in, const Evd2Ptrs& out) {
  using V = typename B::vec;
  V a11 = B::load(in.a11 + i), a22 = B::load(in.a22 + i);
  V re = B::load(in.re + i), im = B::load(in.im + i);

  const V zeta = scale_exponent<B>(a11, a22, re, im);
  const V nzeta = B::xor_(zeta, B::set1(-0.0));
  re = B::scalef(re, zeta);
  im = B::scalef(im, zeta);
  a11 = B::scalef(a11, zeta);
  a22 = B::scalef(a22, zeta);

  const Polar<B> pol = polar2<B>(re, im);
  const V o = B::scalef(pol.modulus, B::set1(1.0));
  const Angles<B> ang = jacobi_angles<B>(a11, a22, o);
  const V C = B::mul(pol.cos_alpha, ang.tan_phi);
  const V S = B::mul(pol.sin_alpha, ang.tan_phi);
  Eigs<B> lam = eigenvalues2<B>(a11, a22, o, ang.tan_phi, ang.sec2_phi);
  const LaneMask p = B::cmp_lt(lam.l1, lam.l2);

  if (out.neg_zeta) {
    B::store(out.neg_zeta + i, nzeta);
  } else {
    lam.l1 = B::scalef(lam.l1, nzeta);
    lam.l2 = B::scalef(lam.l2, nzeta);
  }
  B::store(out.cos_phi + i, ang.cos_phi);
  B::store(out.ca_tan + i, C);
  B::store(out.sa_tan + i, S);
  B::store(out.l1 + i, lam.l1);
  B::store(out.l2 + i, lam.l2);
  *out.perm = p;
  if (out.sin_re) {
    B::store(out.sin_re + i, B::div(C, ang.sec_phi));
    B::store(out.sin_im + i, B::div(S, ang.sec_phi));
  }
}

// Real symmetric chunk; ca_tan receives sign(a21) * tan(phi).
template <class B>
void djac2(std::size_t i, const Batch2Ptrs& in, const Evd2Ptrs& out) {
  using V = typename B::vec;
  V a11 = B::load(in.a11 + i), a22 = B::load(in.a22 + i), a21 = B::load(in.re + i);

  const V zeta = scale_exponent<B>(a11, a22, a21);
  const V nzeta = B::xor_(zeta, B::set1(-0.0));
  a21 = B::scalef(a21, zeta);
  a11 = B::scalef(a11, zeta);
  a22 = B::scalef(a22, zeta);

  const V aa21 = B::abs(a21);
  const V s21 = B::sign(a21);
  const V o = B::scalef(aa21, B::set1(1.0));
  const Angles<B> ang = jacobi_angles<B>(a11, a22, o);
  const V T = B::xor_(ang.tan_phi, s21);
  Eigs<B> lam = eigenvalues2<B>(a11, a22, o, ang.tan_phi, ang.sec2_phi);
  const LaneMask p = B::cmp_lt(lam.l1, lam.l2);

  if (out.neg_zeta) {
    B::store(out.neg_zeta + i, nzeta);
  } else {
    lam.l1 = B::scalef(lam.l1, nzeta);
    lam.l2 = B::scalef(lam.l2, nzeta);
  }
  B::store(out.cos_phi + i, ang.cos_phi);
  B::store(out.ca_tan + i, T);
  B::store(out.l1 + i, lam.l1);
  B::store(out.l2 + i, lam.l2);
  *out.perm = p;
  if (out.sin_re) B::store(out.sin_re + i, B::div(T, ang.sec_phi));
}

}  // namespace kern

}  // namespace jsvd
