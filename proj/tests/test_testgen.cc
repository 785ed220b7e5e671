#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "helpers.hpp"
#include "jsvd/ddouble.hpp"
#include "jsvd/oracle.hpp"
#include "jsvd/testgen.hpp"

using namespace jsvd;
using namespace jsvd::test;

namespace {

// Plain one-sided Jacobi in double-double on a real matrix; returns the
// column norms after convergence, sorted non-increasingly.
std::vector<double> dd_jacobi_sigma(const SplitMatrix& G) {
  const std::size_t m = G.m, n = G.n;
  std::vector<std::vector<DD>> a(n, std::vector<DD>(m));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) a[j][i] = G.re_at(i, j);
  auto dot = [&](std::size_t p, std::size_t q) {
    DD s;
    for (std::size_t i = 0; i < m; ++i) s += a[p][i] * a[q][i];
    return s;
  };
  for (int sweep = 0; sweep < 40; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const DD alpha = dot(p, p), beta = dot(q, q), gamma = dot(p, q);
        if (abs(gamma).hi <= 1e-30 * std::sqrt(alpha.hi * beta.hi)) continue;
        rotated = true;
        const DD zeta = (beta - alpha) / (DD(2.0) * gamma);
        const DD t = DD(zeta.hi < 0 ? -1.0 : 1.0) / (abs(zeta) + sqrt(DD(1.0) + zeta * zeta));
        const DD c = DD(1.0) / sqrt(DD(1.0) + t * t), s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const DD x = a[p][i], y = a[q][i];
          a[p][i] = c * x - s * y;
          a[q][i] = s * x + c * y;
        }
      }
    if (!rotated) break;
  }
  std::vector<double> sig(n);
  for (std::size_t j = 0; j < n; ++j) sig[j] = sqrt(dot(j, j)).hi;
  std::sort(sig.begin(), sig.end(), std::greater<>());
  return sig;
}

bool same_batch(const HermBatch2& a, const HermBatch2& b) {
  return a.r == b.r && a.a11 == b.a11 && a.a22 == b.a22 && a.re_a21 == b.re_a21 && a.im_a21 == b.im_a21;
}

}  // namespace

TEST_SUITE("testgen") {

TEST_CASE("assembly of 2x2 matrices") {
  Elements2 e = assemble2x2(1, -1, DD(0.0), 1, false);
  CHECK(e.a11 == 1.0);
  CHECK(e.a22 == -1.0);
  CHECK(e.re == 0.0);
  CHECK(e.im == 0.0);
  e = assemble2x2(2, 0, DD(1.0), 1, false);
  CHECK(e.a11 == 1.0);
  CHECK(e.a22 == 1.0);
  CHECK(e.re == 1.0);
  CHECK(e.im == 0.0);
  // The sign of tan(phi) becomes a phase of pi.
  e = assemble2x2(2, 0, DD(-1.0), 1, false);
  CHECK(e.re == -1.0);
  e = assemble2x2(2, 0, DD(1.0), 0, true);
  CHECK(e.re == 0.0);
  CHECK(e.im == 1.0);
}

TEST_CASE("2x2 batches") {
  const Gen2x2 a = gen2x2_batch(5000, 7, true), b = gen2x2_batch(5000, 7, true);
  CHECK(same_batch(a.batch, b.batch));
  CHECK(a.lam1 == b.lam1);
  CHECK(!same_batch(a.batch, gen2x2_batch(5000, 8, true).batch));
  const Gen2x2 r = gen2x2_batch(5000, 7, false);
  CHECK(r.lam1 == a.lam1);
  CHECK(r.lam2 == a.lam2);
  CHECK(!r.batch.complex);
  bool ok = true;
  for (std::size_t j = 0; j < 5000; ++j) {
    ok = ok && std::fabs(a.lam1[j]) + std::fabs(a.lam2[j]) <= omega / 16;
    ok = ok && r.batch.a11[j] == a.batch.a11[j];
    // Trace is preserved up to rounding of the assembly.
    const double tr = a.lam1[j] + a.lam2[j];
    const double mx = std::max(std::fabs(a.lam1[j]), std::fabs(a.lam2[j]));
    ok = ok && std::fabs(a.batch.a11[j] + a.batch.a22[j] - tr) <= 4 * eps * mx;
  }
  CHECK(ok);
  CHECK_NOTHROW(a.batch.require_finite());
}

TEST_CASE("spectra") {
  CHECK(spectrum({-3, 4, SpectrumOrder::ascending}, 0) == std::vector<double>{0.125, 0.25, 0.5, 1.0});
  CHECK(spectrum({-3, 4, SpectrumOrder::descending}, 0) == std::vector<double>{1.0, 0.5, 0.25, 0.125});
  auto s = spectrum({-23, 128, SpectrumOrder::random}, 3);
  CHECK(s == spectrum({-23, 128, SpectrumOrder::random}, 3));
  std::sort(s.begin(), s.end());
  CHECK(s == spectrum({-23, 128, SpectrumOrder::ascending}, 3));
  CHECK(s.front() == 0x1p-23);
  CHECK(s.back() == 1.0);
  CHECK(parse_order("asc") == SpectrumOrder::ascending);
  CHECK(parse_order("random") == SpectrumOrder::random);
  CHECK_THROWS(parse_order("sideways"));
}

TEST_CASE_TEMPLATE("xi = 0 gives an orthogonal matrix", T, std::false_type, std::true_type) {
  const bool complex = T::value;
  const std::size_t n = 24;
  const GenSVD g = gen_svd_matrix({0, n, SpectrumOrder::random}, 11, complex);
  for (double x : g.sigma) CHECK(x == 1.0);
  double worst = 0;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p; q < n; ++q) {
      DD re = quad_dot(g.G.re_col(p), g.G.re_col(q), n), im;
      if (complex) {
        re += quad_dot(g.G.im_col(p), g.G.im_col(q), n);
        im = quad_dot(g.G.re_col(p), g.G.im_col(q), n) - quad_dot(g.G.im_col(p), g.G.re_col(q), n);
      }
      if (p == q) re -= DD(1.0);
      worst = std::max(worst, std::hypot(re.hi, im.hi));
    }
  CHECK(worst < 8 * n * eps);
}

TEST_CASE("generation is reproducible and independent of workers") {
  const GenSVD a = gen_svd_matrix({-23, 40, SpectrumOrder::random}, 3, true);
  const GenSVD b = gen_svd_matrix({-23, 40, SpectrumOrder::random}, 3, true, 8, 4);
  CHECK(a.G.re == b.G.re);
  CHECK(a.G.im == b.G.im);
  CHECK(a.sigma == b.sigma);
  const GenSVD c = gen_svd_matrix({-23, 40, SpectrumOrder::random}, 4, true);
  CHECK(a.G.re != c.G.re);
}

TEST_CASE("singular values agree with a double-double Jacobi") {
  const GenSVD g = gen_svd_matrix({-3, 8, SpectrumOrder::random}, 21, false);
  auto want = g.sigma;
  std::sort(want.begin(), want.end(), std::greater<>());
  const auto got = dd_jacobi_sigma(g.G);
  // Only the final rounding of G perturbs the values.
  for (std::size_t j = 0; j < 8; ++j) CHECK(std::fabs(got[j] / want[j] - 1) < 64 * eps);
}

TEST_CASE("sidecar files") {
  const auto dir = std::filesystem::temp_directory_path();
  const Gen2x2 a = gen2x2_batch(100, 3, true);
  const auto lam = (dir / "jsvd_test.lam").string();
  write_lambdas(lam, a.lam1, a.lam2);
  std::vector<double> l1, l2;
  read_lambdas(lam, l1, l2);
  CHECK(l1 == a.lam1);
  CHECK(l2 == a.lam2);
  std::filesystem::remove(lam);

  const auto sig = spectrum({-52, 64, SpectrumOrder::random}, 5);
  const auto csv = (dir / "jsvd_test.sigma.csv").string();
  write_sigma_csv(csv, sig, "# xi=-52\n");
  CHECK(read_sigma_csv(csv) == sig);
  std::filesystem::remove(csv);
  CHECK_THROWS(read_lambdas((dir / "jsvd_missing.lam").string(), l1, l2));
}

}  // TEST_SUITE
