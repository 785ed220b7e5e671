#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "jsvd/evd2.hpp"
#include "jsvd/oracle.hpp"
#include "jsvd/svd.hpp"
#include "jsvd/testgen.hpp"

using namespace jsvd;
using namespace jsvd::test;

namespace {

// The single-precision failure case of the complex reference routine, moved
// into the binary64 range: A and C scaled by 2^-896, B = mu (1 - i).
struct Witness {
  double a, b21_re, b21_im, c;
};
Witness witness() {
  const float A = -1.428758589291419051209e-38f, C = -1.429318548157763248111e-38f;
  return {std::ldexp(double(A), -896), mu, mu, std::ldexp(double(C), -896)};
}

bool close(double x, double y, double tol) { return std::fabs(x - y) <= tol * std::fabs(y); }

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("reference EVD of a diagonal matrix") {
  const RefEVD r = ref_evd2(3, 0, 0, 1);
  CHECK(r.rt1 == 3.0);
  CHECK(r.rt2 == 1.0);
  // The final column exchange of the reference routine flips the sign.
  CHECK(std::fabs(r.cs1) == 1.0);
  CHECK(r.sn1_re == 0.0);
  CHECK(r.sn1_im == 0.0);
  const RefEVD s = ref_evd2_real(1, 0, 3);
  CHECK(s.rt1 == 3.0);
  CHECK(std::fabs(s.sn1_re) == 1.0);
}

TEST_CASE("failure witness of the reference routine") {
  const Witness w = witness();
  // |B| collapses to mu, so conj(B)/|B| = 1 + i.
  CHECK(std::hypot(mu, mu) == mu);
  const RefEVD r = ref_evd2(w.a, w.b21_re, w.b21_im, w.c);
  CHECK(r.sn1_re == 1.0);
  CHECK(r.sn1_im == 1.0);
  CHECK(std::fabs(r.cs1) < 1e-6);
  CHECK(det_residual(r.cs1, r.sn1_re, r.sn1_im) > 0.99);
  CHECK(r.rt1 == w.c);
  CHECK(r.rt2 == w.a);

  // The batched kernel stays unitary on the same input.
  HermBatch2 b = HermBatch2::make(1, true);
  b.a11[0] = w.a;
  b.a22[0] = w.c;
  b.re_a21[0] = w.b21_re;
  b.im_a21[0] = w.b21_im;
  Evd2Options opt;
  opt.want_sines = true;
  const EVDOut2 o = evd2_batch(b, opt);
  CHECK(det_residual(o.cos_phi[0], o.sin_re[0], o.sin_im[0]) < 8 * eps);
}

TEST_CASE("dot products and norms") {
  double e1[4] = {1, 0, 0, 0}, e2[4] = {0, 1, 0, 0};
  CHECK(quad_dot(e1, e1, 4) == DD(1.0));
  CHECK(quad_dot(e1, e2, 4) == DD(0.0));
  const double big[2] = {omega, omega};
  const QuadNorm q = quad_norm(big, 2);
  CHECK(q.e == 1023);
  CHECK(close(q.f.hi, std::sqrt(2.0) * std::ldexp(omega, -1023), 2 * eps));
  CHECK(q.to_double() == inf);
  const double z[3] = {0, 0, 0};
  CHECK(quad_norm(z, 3).f.hi == 0.0);
  CHECK(rel_error(EFNumber{}, quad_norm(z, 3)) == 0.0);
  CHECK(rel_error(EFNumber{1023, std::sqrt(2.0) * std::ldexp(omega, -1023)}, q) < eps);
}

TEST_CASE("double-double identities") {
  SplitMix64 g(61);
  double worst = 0;
  for (int t = 0; t < 10000; ++t) {
    const double a = random_unit(g), b = std::ldexp(random_unit(g), 60);
    const DD s = (DD(a) + DD(b)) - DD(b);
    CHECK(s.to_double() == a);
    const DD x = DD(std::fabs(b)) + DD(std::ldexp(std::fabs(a), -60));
    if (x.hi == 0) continue;
    worst = std::max(worst, std::fabs(((sqrt(x * x) - x) / x).hi));
  }
  CHECK(worst <= 0x1p-100);
  const DD third = DD(1.0) / DD(3.0);
  CHECK(std::fabs((third * DD(3.0) - DD(1.0)).hi) <= 0x1p-104);
}

TEST_CASE("determinant residual") {
  CHECK(det_residual(1, 0, 0) == 0.0);
  const double h = 1 / std::sqrt(2.0);
  CHECK(det_residual(h, h, 0) <= 4 * eps);
  CHECK(det_residual(h, h / std::sqrt(2.0), h / std::sqrt(2.0)) <= 4 * eps);
}

TEST_CASE("error measures of an exact decomposition") {
  const SplitMatrix I = SplitMatrix::identity(6, true);
  std::vector<EFNumber> ones(6, EFNumber{0, 1});
  const SVDErrors e = error_measures(I, I, I, ones, std::vector<double>(6, 1.0));
  CHECK(e.r_G == 0.0);
  CHECK(e.r_U == 0.0);
  CHECK(e.r_V == 0.0);
  CHECK(e.r_Sigma == 0.0);
  CHECK_THROWS_AS(error_measures(I, I, I, ones, std::vector<double>(5, 1.0)), std::invalid_argument);
}

TEST_CASE("a column of U scaled by 1 + 1e-8") {
  const SplitMatrix I = SplitMatrix::identity(6, false);
  SplitMatrix U = I;
  U.re_at(2, 2) = 1 + 1e-8;
  std::vector<EFNumber> ones(6, EFNumber{0, 1});
  const SVDErrors e = error_measures(I, U, I, ones, std::vector<double>(6, 1.0));
  // |u|^2 - 1 = 2 delta + delta^2.
  CHECK(close(e.r_U, 2e-8 + 1e-16, 1e-7));
  CHECK(close(e.r_U_sq, e.r_U * e.r_U, 1e-12));
  CHECK(close(e.r_G, 1e-8 / std::sqrt(6.0), 1e-7));
  CHECK(e.r_V == 0.0);
}

TEST_CASE("error measures are invariant under a joint column permutation") {
  const GenSVD g = gen_svd_matrix({-12, 16, SpectrumOrder::random}, 13, true);
  const SVDResult r = svd_run(g.G);
  REQUIRE(r.converged);
  const SVDErrors a = error_measures(g.G, r.U, r.V, r.sigma, g.sigma);
  std::vector<std::size_t> perm(16);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.begin() + 9);
  std::swap(perm[10], perm[15]);
  SplitMatrix U = r.U, V = r.V;
  std::vector<EFNumber> sig(16);
  for (std::size_t k = 0; k < 16; ++k) {
    std::copy_n(r.U.re_col(perm[k]), r.U.m_tilde, U.re_col(k));
    std::copy_n(r.U.im_col(perm[k]), r.U.m_tilde, U.im_col(k));
    std::copy_n(r.V.re_col(perm[k]), r.V.m_tilde, V.re_col(k));
    std::copy_n(r.V.im_col(perm[k]), r.V.m_tilde, V.im_col(k));
    sig[k] = r.sigma[perm[k]];
  }
  auto ref = g.sigma;
  std::reverse(ref.begin(), ref.end());
  const SVDErrors b = error_measures(g.G, U, V, sig, ref, 3);
  CHECK(close(b.r_G, a.r_G, 1e-12));
  CHECK(close(b.r_U, a.r_U, 1e-12));
  CHECK(close(b.r_V, a.r_V, 1e-12));
  CHECK(b.r_Sigma == a.r_Sigma);
}

TEST_CASE("batch comparison") {
  HermBatch2 d = HermBatch2::make(100, true);
  std::vector<double> l1(100), l2(100);
  for (std::size_t j = 0; j < 100; ++j) {
    d.a11[j] = l1[j] = double(j + 1);
    d.a22[j] = l2[j] = -0.5 * double(j);
  }
  Evd2Options opt;
  opt.want_sines = true;
  const EvdCompare c = ref_evd2_batch_compare(d, evd2_batch(d, opt), ref_evd2_batch(d), l1, l2);
  CHECK(c.count == 100);
  CHECK(c.rho_kernel == 0.0);
  CHECK(c.rho_ref == 0.0);
  CHECK(c.delta_kernel == 0.0);
  CHECK(c.lamF_kernel == 0.0);
  CHECK(c.lamMax_ref == 0.0);

  // The batched routine is at least about as accurate as the reference one.
  const Gen2x2 gen = gen2x2_batch(50 * 1000, 17, false);
  const EVDOut2 k = evd2_batch(gen.batch, opt);
  const auto ref = ref_evd2_batch(gen.batch);
  std::vector<double> ratio;
  for (std::size_t i = 0; i < 50; ++i) {
    const EvdCompare s =
        ref_evd2_batch_compare(gen.batch, k, ref, gen.lam1, gen.lam2, i * 1000, (i + 1) * 1000);
    ratio.push_back(s.rho_ref / s.rho_kernel);
  }
  std::nth_element(ratio.begin(), ratio.begin() + 25, ratio.end());
  CHECK(ratio[25] >= 0.5);
}

TEST_CASE("residual of a single 2x2 EVD") {
  CHECK(evd_residual(2, 1, 0, 0, 1, 0, 0, 2, 1) == 0.0);
  const double h = 1 / std::sqrt(2.0);
  // [[1,1],[1,1]] = U diag(2, 0) U^* with c = s = 1/sqrt 2.
  CHECK(evd_residual(1, 1, 1, 0, h, h, 0, 2, 0) < 4 * eps);
  CHECK(evd_residual(1, 1, 1, 0, 1, 0, 0, 2, 0) > 0.5);
}

}  // TEST_SUITE
