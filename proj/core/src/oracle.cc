#include "jsvd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "jsvd/parallel.hpp"

namespace jsvd {

RefEVD ref_evd2_real(double a, double b, double c) {
  RefEVD r;
  const double sm = a + c;
  const double df = a - c;
  const double adf = std::fabs(df);
  const double tb = b + b;
  const double ab = std::fabs(tb);
  double acmx, acmn;
  if (std::fabs(a) > std::fabs(c)) {
    acmx = a;
    acmn = c;
  } else {
    acmx = c;
    acmn = a;
  }
  double rt;
  if (adf > ab)
    rt = adf * std::sqrt(1.0 + (ab / adf) * (ab / adf));
  else if (adf < ab)
    rt = ab * std::sqrt(1.0 + (adf / ab) * (adf / ab));
  else
    rt = ab * std::sqrt(2.0);
  int sgn1;
  if (sm < 0.0) {
    r.rt1 = 0.5 * (sm - rt);
    sgn1 = -1;
    r.rt2 = (acmx / r.rt1) * acmn - (b / r.rt1) * b;
  } else if (sm > 0.0) {
    r.rt1 = 0.5 * (sm + rt);
    sgn1 = 1;
    r.rt2 = (acmx / r.rt1) * acmn - (b / r.rt1) * b;
  } else {
    r.rt1 = 0.5 * rt;
    r.rt2 = -0.5 * rt;
    sgn1 = 1;
  }
  int sgn2;
  double cs;
  if (df >= 0.0) {
    cs = df + rt;
    sgn2 = 1;
  } else {
    cs = df - rt;
    sgn2 = -1;
  }
  const double acs = std::fabs(cs);
  double cs1, sn1;
  if (acs > ab) {
    const double ct = -tb / cs;
    sn1 = 1.0 / std::sqrt(1.0 + ct * ct);
    cs1 = ct * sn1;
  } else if (ab == 0.0) {
    cs1 = 1.0;
    sn1 = 0.0;
  } else {
    const double tn = -cs / tb;
    cs1 = 1.0 / std::sqrt(1.0 + tn * tn);
    sn1 = tn * cs1;
  }
  if (sgn1 == sgn2) {
    const double tn = cs1;
    cs1 = -sn1;
    sn1 = tn;
  }
  r.cs1 = cs1;
  r.sn1_re = sn1;
  return r;
}

RefEVD ref_evd2(double a, double b21_re, double b21_im, double c) {
  // ZLAEV2: W = conj(B)/|B| (componentwise division by a real), then
  // DLAEV2 on |B| and SN1 = W * T.
  const double ab = std::hypot(b21_re, b21_im);
  double w_re = 1.0, w_im = 0.0;
  if (ab != 0.0) {
    w_re = b21_re / ab;
    w_im = b21_im / ab;
  }
  RefEVD r = ref_evd2_real(a, ab, c);
  const double t = r.sn1_re;
  r.sn1_re = w_re * t;
  r.sn1_im = w_im * t;
  return r;
}

DD quad_dot(const double* x, const double* y, std::size_t n) {
  DD s;
  for (std::size_t i = 0; i < n; ++i) s += dd::two_prod(x[i], y[i]);
  return s;
}

namespace {

int max_exponent(const double* x, std::size_t n) {
  int E = std::numeric_limits<int>::min();
  for (std::size_t i = 0; i < n; ++i)
    if (x[i] != 0.0) E = std::max(E, std::ilogb(x[i]));
  return E;
}

}  // namespace

QuadNorm quad_norm_complex(const double* re, const double* im, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(re[i]) || (im && !std::isfinite(im[i])))
      throw std::invalid_argument("quad_norm: non-finite element");
  int E = max_exponent(re, n);
  if (im) E = std::max(E, max_exponent(im, n));
  QuadNorm q;
  if (E == std::numeric_limits<int>::min()) return q;  // zero
  DD s;
  auto acc = [&](const double* x) {
    for (std::size_t i = 0; i < n; ++i) {
      const double y = std::ldexp(x[i], -E);
      s += dd::two_prod(y, y);
    }
  };
  acc(re);
  if (im) acc(im);
  q.f = sqrt(s);
  q.e = E;
  return q;
}

QuadNorm quad_norm(const double* x, std::size_t n) { return quad_norm_complex(x, nullptr, n); }

double rel_error(const EFNumber& x, const QuadNorm& ref) {
  if (ref.f.hi == 0.0) return x.is_zero() ? 0.0 : FloatEnv::inf;
  if (x.is_zero()) return 1.0;
  const double d = x.e - ref.e;
  if (std::fabs(d) > 2000) return FloatEnv::inf;
  const DD r = ldexp(DD(x.f) / ref.f, static_cast<int>(d)) - DD(1.0);
  return std::fabs(r.hi);
}

namespace {

// Entries i >= i0 of column j of X^* X; the rest follow by symmetry.
void gram_column(const SplitMatrix& X, std::size_t j, std::size_t i0, std::vector<CDD>& out) {
  const std::size_t m = X.m;
  const double* yr = X.re_col(j);
  const double* yi = X.im_col(j);
  for (std::size_t i = i0; i < X.n; ++i) {
    const double* xr = X.re_col(i);
    const double* xi = X.im_col(i);
    DD re, im;
    for (std::size_t k = 0; k < m; ++k) {
      re += dd::two_prod(xr[k], yr[k]);
      if (yi) {
        re += dd::two_prod(xi[k], yi[k]);
        im += dd::two_prod(xr[k], yi[k]);
        im -= dd::two_prod(xi[k], yr[k]);
      }
    }
    out[i] = {re, im};
  }
}

// ||X^* X - I||_F^2 in double-double.
DD orthogonality_sq(const SplitMatrix& X, unsigned workers) {
  const std::size_t n = X.n;
  std::vector<DD> col(n);
  Workers w(workers);
  w.run([&] {
    w.for_n(n, [&](std::size_t j) {
      std::vector<CDD> g(n);
      gram_column(X, j, j, g);
      DD s = sq(g[j].re - DD(1.0)) + sq(g[j].im);
      for (std::size_t i = j + 1; i < n; ++i) s += ldexp(norm2(g[i]), 1);
      col[j] = s;
    });
  });
  DD t;
  for (const DD& c : col) t += c;
  return t;
}

}  // namespace

SVDErrors error_measures(const SplitMatrix& G, const SplitMatrix& U, const SplitMatrix& V,
                         const std::vector<EFNumber>& sigma, const std::vector<double>& sigma_ref,
                         unsigned workers) {
  const std::size_t m = G.m, n = G.n;
  if (U.m != m || U.n != n || V.m != n || V.n != n || sigma.size() != n || sigma_ref.size() != n)
    throw std::invalid_argument("error_measures: dimension mismatch");
  SVDErrors r;

  std::vector<double> sv(n);
  for (std::size_t k = 0; k < n; ++k) sv[k] = sigma[k].to_double();

  // r_G, column by column of U Sigma V^* - G.
  std::vector<DD> res(n), gn(n);
  Workers w(workers);
  w.run([&] {
    w.for_n(n, [&](std::size_t j) {
      DD rs, gs;
      for (std::size_t i = 0; i < m; ++i) {
        DD re, im;
        for (std::size_t k = 0; k < n; ++k) {
          const double ur = U.re_at(i, k), ui = U.im_at(i, k);
          const double vr = V.re_at(j, k), vi = V.im_at(j, k);
          // u * sigma * conj(v)
          DD pr = dd::two_prod(ur, vr) + dd::two_prod(ui, vi);
          DD pi = dd::two_prod(ui, vr) - dd::two_prod(ur, vi);
          re += pr * DD(sv[k]);
          im += pi * DD(sv[k]);
        }
        const double gr = G.re_at(i, j), gi = G.im_at(i, j);
        rs += sq(re - DD(gr)) + sq(im - DD(gi));
        gs += dd::two_prod(gr, gr) + dd::two_prod(gi, gi);
      }
      res[j] = rs;
      gn[j] = gs;
    });
  });
  DD rs, gs;
  for (std::size_t j = 0; j < n; ++j) {
    rs += res[j];
    gs += gn[j];
  }
  r.r_G = gs.hi == 0.0 ? (rs.hi == 0.0 ? 0.0 : FloatEnv::inf) : sqrt(rs / gs).hi;

  const DD u2 = orthogonality_sq(U, workers), v2 = orthogonality_sq(V, workers);
  r.r_U_sq = u2.hi;
  r.r_V_sq = v2.hi;
  r.r_U = sqrt(u2).hi;
  r.r_V = sqrt(v2).hi;

  std::vector<EFNumber> a = sigma;
  std::sort(a.begin(), a.end(), [](const EFNumber& x, const EFNumber& y) { return !ef_le(x, y); });
  std::vector<double> b = sigma_ref;
  std::sort(b.begin(), b.end(), std::greater<>());
  for (std::size_t j = 0; j < n; ++j) {
    const DD x = ldexp(DD(a[j].f), static_cast<int>(a[j].is_zero() ? 0 : a[j].e));
    const DD s = a[j].is_zero() ? DD(0.0) : x;
    double e;
    if (b[j] == 0.0)
      e = s.hi == 0.0 ? 0.0 : FloatEnv::inf;
    else
      e = std::fabs(((s - DD(b[j])) / DD(b[j])).hi);
    r.r_Sigma = std::max(r.r_Sigma, e);
  }
  return r;
}

double det_residual(double c, double s_re, double s_im) {
  const DD d = dd::two_prod(c, c) + dd::two_prod(s_re, s_re) + dd::two_prod(s_im, s_im) - DD(1.0);
  return std::fabs(d.hi);
}

double evd_residual(double a11, double a22, double a21_re, double a21_im, double c, double s_re,
                    double s_im, double l1, double l2) {
  int E = std::numeric_limits<int>::min();
  for (double x : {a11, a22, a21_re, a21_im, l1, l2})
    if (x != 0.0 && std::isfinite(x)) E = std::max(E, std::ilogb(x));
  if (!std::isfinite(l1) || !std::isfinite(l2)) return FloatEnv::inf;
  if (E == std::numeric_limits<int>::min()) return 0.0;
  auto sc = [E](double x) { return DD(std::ldexp(x, -E)); };
  const DD L1 = sc(l1), L2 = sc(l2);
  const DD cc = dd::two_prod(c, c);
  const DD ss = dd::two_prod(s_re, s_re) + dd::two_prod(s_im, s_im);
  const DD r11 = L1 * cc + L2 * ss - sc(a11);
  const DD r22 = L1 * ss + L2 * cc - sc(a22);
  const DD dl = L1 - L2;
  const DD r21r = dd::two_prod(c, s_re) * dl - sc(a21_re);
  const DD r21i = dd::two_prod(c, s_im) * dl - sc(a21_im);
  const DD rn = sq(r11) + sq(r22) + ldexp(sq(r21r) + sq(r21i), 1);
  const DD an = sq(sc(a11)) + sq(sc(a22)) + ldexp(sq(sc(a21_re)) + sq(sc(a21_im)), 1);
  if (an.hi == 0.0) return rn.hi == 0.0 ? 0.0 : FloatEnv::inf;
  return sqrt(rn / an).hi;
}

std::vector<RefEVD> ref_evd2_batch(const HermBatch2& b) {
  std::vector<RefEVD> out(b.r);
  for (std::size_t j = 0; j < b.r; ++j)
    out[j] = b.complex ? ref_evd2(b.a11[j], b.re_a21[j], b.im_a21[j], b.a22[j])
                       : ref_evd2_real(b.a11[j], b.re_a21[j], b.a22[j]);
  return out;
}

namespace {

// Eigenvalue residuals of a computed pair against the prescribed one; both
// pairs are ordered by magnitude (then value) before comparing.
void lambda_residuals(double c1, double c2, double p1, double p2, double& lamF, double& lamMax) {
  auto order = [](double& x, double& y) {
    if (std::fabs(x) < std::fabs(y) || (std::fabs(x) == std::fabs(y) && x < y)) std::swap(x, y);
  };
  order(c1, c2);
  order(p1, p2);
  int E = std::numeric_limits<int>::min();
  for (double x : {c1, c2, p1, p2})
    if (x != 0.0 && std::isfinite(x)) E = std::max(E, std::ilogb(x));
  if (!std::isfinite(c1) || !std::isfinite(c2)) {
    lamF = lamMax = FloatEnv::inf;
    return;
  }
  if (E == std::numeric_limits<int>::min()) {
    lamF = lamMax = 0.0;
    return;
  }
  auto sc = [E](double x) { return DD(std::ldexp(x, -E)); };
  const DD d1 = sc(c1) - sc(p1), d2 = sc(c2) - sc(p2);
  const DD num = sq(d1) + sq(d2), den = sq(sc(p1)) + sq(sc(p2));
  lamF = den.hi == 0.0 ? (num.hi == 0.0 ? 0.0 : FloatEnv::inf) : sqrt(num / den).hi;
  lamMax = p1 == 0.0 ? (c1 == 0.0 ? 0.0 : FloatEnv::inf) : std::fabs((d1 / sc(p1)).hi);
}

}  // namespace

EvdCompare ref_evd2_batch_compare(const HermBatch2& b, const EVDOut2& k,
                                  const std::vector<RefEVD>& ref, const std::vector<double>& lam1,
                                  const std::vector<double>& lam2, std::size_t begin,
                                  std::size_t end) {
  if (k.sin_re.size() != k.r_tilde) throw std::invalid_argument("kernel output lacks sines");
  if (ref.size() != b.r || k.r != b.r) throw std::invalid_argument("batch size mismatch");
  const bool have_lam = lam1.size() == b.r && lam2.size() == b.r;
  end = std::min(end, b.r);
  EvdCompare c;
  for (std::size_t j = begin; j < end; ++j) {
    const double im = b.complex ? b.im_a21[j] : 0.0;
    const double ks_im = b.complex ? k.sin_im[j] : 0.0;
    const double rk = evd_residual(b.a11[j], b.a22[j], b.re_a21[j], im, k.cos_phi[j], k.sin_re[j],
                                   ks_im, k.lambda1[j], k.lambda2[j]);
    const RefEVD& R = ref[j];
    // The reference eigenvector of rt1 is (cs1, sn1); rt2 goes with the other column.
    const double rr = evd_residual(b.a11[j], b.a22[j], b.re_a21[j], im, R.cs1, R.sn1_re, R.sn1_im,
                                   R.rt1, R.rt2);
    c.rho_kernel = std::max(c.rho_kernel, rk);
    c.rho_ref = std::max(c.rho_ref, rr);
    c.delta_kernel = std::max(c.delta_kernel, det_residual(k.cos_phi[j], k.sin_re[j], ks_im));
    c.delta_ref = std::max(c.delta_ref, det_residual(R.cs1, R.sn1_re, R.sn1_im));
    if (have_lam) {
      double f, m;
      lambda_residuals(k.lambda1[j], k.lambda2[j], lam1[j], lam2[j], f, m);
      c.lamF_kernel = std::max(c.lamF_kernel, f);
      c.lamMax_kernel = std::max(c.lamMax_kernel, m);
      lambda_residuals(R.rt1, R.rt2, lam1[j], lam2[j], f, m);
      c.lamF_ref = std::max(c.lamF_ref, f);
      c.lamMax_ref = std::max(c.lamMax_ref, m);
    }
    ++c.count;
  }
  return c;
}

}  // namespace jsvd
