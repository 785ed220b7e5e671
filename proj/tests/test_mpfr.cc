#include <doctest.h>
#include <mpfr.h>

#include <cmath>

#include "helpers.hpp"
#include "jsvd/ddouble.hpp"
#include "jsvd/oracle.hpp"

using namespace jsvd;
using namespace jsvd::test;

namespace {

struct Mp {
  mpfr_t v;
  Mp() { mpfr_init2(v, 256); }
  explicit Mp(double x) : Mp() { mpfr_set_d(v, x, MPFR_RNDN); }
  ~Mp() { mpfr_clear(v); }
  Mp(const Mp&) = delete;
  Mp& operator=(const Mp&) = delete;
};

// |dd / mp - 1|
double rel(const DD& dd, const Mp& ref) {
  Mp x(dd.hi), lo(dd.lo), r;
  mpfr_add(x.v, x.v, lo.v, MPFR_RNDN);
  mpfr_div(r.v, x.v, ref.v, MPFR_RNDN);
  mpfr_sub_ui(r.v, r.v, 1, MPFR_RNDN);
  return std::fabs(mpfr_get_d(r.v, MPFR_RNDN));
}

}  // namespace

TEST_SUITE("mpfr") {

TEST_CASE("frozen angle values") {
  // tan(pi/8) = sqrt(2) - 1 and cos(pi/8).
  Mp pi8, t, c;
  mpfr_const_pi(pi8.v, MPFR_RNDN);
  mpfr_div_ui(pi8.v, pi8.v, 8, MPFR_RNDN);
  mpfr_tan(t.v, pi8.v, MPFR_RNDN);
  mpfr_cos(c.v, pi8.v, MPFR_RNDN);
  CHECK(mpfr_get_d(c.v, MPFR_RNDN) == 0x1.d906bcf328d46p-1);
  Mp d(0x1.a827999fcef33p-2);
  mpfr_sub(d.v, d.v, t.v, MPFR_RNDN);
  mpfr_div(d.v, d.v, t.v, MPFR_RNDN);
  CHECK(std::fabs(mpfr_get_d(d.v, MPFR_RNDN)) < eps);
}

TEST_CASE("double-double operations") {
  SplitMix64 g(71);
  double worst = 0;
  for (int k = 0; k < 20000; ++k) {
    const DD a = DD(random_unit(g)) + DD(std::ldexp(random_unit(g), -54));
    const DD b = DD(1.5 + random_unit(g)) + DD(std::ldexp(random_unit(g), -54));
    Mp ma(a.hi), mb(b.hi), t, r;
    mpfr_set_d(t.v, a.lo, MPFR_RNDN);
    mpfr_add(ma.v, ma.v, t.v, MPFR_RNDN);
    mpfr_set_d(t.v, b.lo, MPFR_RNDN);
    mpfr_add(mb.v, mb.v, t.v, MPFR_RNDN);
    mpfr_mul(r.v, ma.v, mb.v, MPFR_RNDN);
    worst = std::max(worst, rel(a * b, r));
    mpfr_div(r.v, ma.v, mb.v, MPFR_RNDN);
    worst = std::max(worst, rel(a / b, r));
    mpfr_sqrt(r.v, mb.v, MPFR_RNDN);
    worst = std::max(worst, rel(sqrt(b), r));
  }
  CHECK(worst < 0x1p-100);
}

TEST_CASE("quad_norm against MPFR") {
  SplitMix64 g(72);
  const std::size_t n = 4096;
  std::vector<double> x(n);
  for (int e : {0, 900, -900}) {
    for (double& v : x) v = std::ldexp(random_unit(g), e);
    Mp s, t;
    mpfr_set_zero(s.v, 1);
    for (double v : x) {
      mpfr_set_d(t.v, v, MPFR_RNDN);
      mpfr_mul_2si(t.v, t.v, -e, MPFR_RNDN);
      mpfr_sqr(t.v, t.v, MPFR_RNDN);
      mpfr_add(s.v, s.v, t.v, MPFR_RNDN);
    }
    mpfr_sqrt(s.v, s.v, MPFR_RNDN);
    const QuadNorm q = quad_norm(x.data(), n);
    Mp back;
    mpfr_mul_2si(back.v, s.v, e - q.e, MPFR_RNDN);
    CHECK(rel(q.f, back) < 0x1p-95);
  }
}

}  // TEST_SUITE
