#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "jsvd/lanes.hpp"

using namespace jsvd;
using namespace jsvd::test;

namespace {

template <class B>
typename B::vec vec_of(std::initializer_list<double> v) {
  alignas(64) double t[B::width] = {};
  int i = 0;
  for (double x : v) t[i++] = x;
  return B::load(t);
}

template <class B>
std::vector<double> lanes_of(typename B::vec x) {
  alignas(64) double t[B::width];
  B::store(t, x);
  return {t, t + B::width};
}

template <class B>
double first(typename B::vec x) {
  return B::lane(x, 0);
}

}  // namespace

TEST_SUITE("lanes") {

TEST_CASE_TEMPLATE("min and max return the second argument for a NaN first argument", B, lanes::Emu<8>,
                   lanes::Native, lanes::Emu<4>) {
  const double nan = std::nan("");
  CHECK(first<B>(B::max(B::set1(nan), B::set1(0.0))) == 0.0);
  CHECK(first<B>(B::min(B::set1(nan), B::set1(1.0))) == 1.0);
  CHECK(first<B>(B::min(B::set1(2.0), B::set1(3.0))) == 2.0);
  SplitMix64 g(11);
  for (int k = 0; k < 1000; ++k) {
    const double b = random_finite(g);
    CHECK(same_bits(first<B>(B::min(B::set1(nan), B::set1(b))), b));
    CHECK(same_bits(first<B>(B::max(B::set1(nan), B::set1(b))), b));
  }
}

TEST_CASE_TEMPLATE("scalef", B, lanes::Emu<8>, lanes::Native) {
  CHECK(first<B>(B::scalef(B::set1(1.5), B::set1(3.0))) == 12.0);
  CHECK(same_bits(first<B>(B::scalef(B::set1(1.0), B::set1(-inf))), 0.0));
  CHECK(first<B>(B::scalef(B::set1(mu), B::set1(1020.0))) == 0x1p-54);
  CHECK(first<B>(B::scalef(B::set1(1.0), B::set1(1024.0))) == inf);
  SplitMix64 g(12);
  for (int k = 0; k < 10000; ++k) {
    const double x = std::ldexp(1.0 + std::fabs(random_unit(g)), int(g.below(1000)) - 500);
    const double e = double(int(g.below(800)) - 400);
    CHECK(first<B>(B::scalef(B::scalef(B::set1(x), B::set1(e)), B::set1(-e))) == x);
  }
}

TEST_CASE_TEMPLATE("getexp and getmant", B, lanes::Emu<8>, lanes::Native) {
  CHECK(first<B>(B::getexp(B::set1(12.0))) == 3.0);
  CHECK(first<B>(B::getmant(B::set1(12.0))) == 1.5);
  CHECK(first<B>(B::getmant(B::set1(-12.0))) == 1.5);
  CHECK(first<B>(B::getexp(B::set1(0.0))) == -inf);
  CHECK(first<B>(B::getexp(B::set1(mu))) == -1074.0);
  CHECK(first<B>(B::getmant(B::set1(mu))) == 1.0);
  CHECK(first<B>(B::getexp(B::set1(omega))) == 1023.0);
}

TEST_CASE_TEMPLATE("sign bit operations", B, lanes::Emu<8>, lanes::Native) {
  CHECK(same_bits(first<B>(B::abs(B::set1(-0.0))), 0.0));
  CHECK(first<B>(B::or_(B::set1(1.0), B::sign(B::set1(-3.0)))) == -1.0);
  CHECK(first<B>(B::xor_(B::set1(5.0), B::set1(-0.0))) == -5.0);
  CHECK(same_bits(first<B>(B::xor_(B::set1(0.0), B::set1(-0.0))), -0.0));
}

TEST_CASE_TEMPLATE("fused multiply-add", B, lanes::Emu<8>, lanes::Native) {
  CHECK(first<B>(B::fmadd(B::set1(2.0), B::set1(3.0), B::set1(1.0))) == 7.0);
  const double r = FloatEnv::sqrt_omega;
  CHECK(std::isfinite(first<B>(B::fmadd(B::set1(r), B::set1(r), B::set1(1.0)))));
  // One rounding: (1 + u)(1 - u) - 1 = -u^2 with u the spacing at 1.
  const double u = 0x1p-52;
  CHECK(first<B>(B::fmadd(B::set1(1 + u), B::set1(1 - u), B::set1(-1.0))) == -u * u);
  CHECK(first<B>(B::fmsub(B::set1(2.0), B::set1(3.0), B::set1(1.0))) == 5.0);
  CHECK(first<B>(B::fnmadd(B::set1(2.0), B::set1(3.0), B::set1(1.0))) == -5.0);
}

TEST_CASE_TEMPLATE("horizontal reductions", B, lanes::Emu<8>, lanes::Native) {
  CHECK(B::reduce_max(vec_of<B>({1, 7, 3, 2, 0, 0, 0, 0})) == 7.0);
  CHECK(B::reduce_add(B::zero()) == 0.0);
  const auto v = vec_of<B>({1e16, 1, 1, 1, 1, 1, 1, 1});
  double s = 1e16;
  for (int l = 1; l < 8; ++l) s += 1.0;
  CHECK(B::reduce_add(v) == s);
}

TEST_CASE_TEMPLATE("compress, permute and blend", B, lanes::Emu<8>, lanes::Native) {
  const auto x = vec_of<B>({1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(lanes_of<B>(B::compress(0b01010101, x)) == std::vector<double>{1, 3, 5, 7, 0, 0, 0, 0});
  alignas(64) const std::int64_t id[8] = {0, 1, 2, 3, 4, 5, 6, 7};
  alignas(64) const std::int64_t rev[8] = {7, 6, 5, 4, 3, 2, 1, 0};
  CHECK(lanes_of<B>(B::permute(id, x)) == lanes_of<B>(x));
  CHECK(lanes_of<B>(B::permute(rev, x)) == std::vector<double>{8, 7, 6, 5, 4, 3, 2, 1});
  const auto y = B::set1(-1.0);
  CHECK(lanes_of<B>(B::blend(0xff, x, y)) == lanes_of<B>(y));
  CHECK(lanes_of<B>(B::blend(0x0, x, y)) == lanes_of<B>(x));
}

TEST_CASE("emulated and native lanes agree bit for bit on random patterns") {
  using E = lanes::Emu<8>;
  using N = lanes::Native;
  SplitMix64 g(2024);
  constexpr int trials = 1000000 / 8;
  alignas(64) double a[8], b[8], c[8];
  alignas(64) std::int64_t idx[8];
  std::map<std::string, std::size_t> bad;
  auto cmp = [&](const char* op, E::vec e, N::vec n) {
    const auto le = lanes_of<E>(e);
    const auto ln = lanes_of<N>(n);
    for (int l = 0; l < 8; ++l) bad[op] += !same_value(le[l], ln[l]);
  };
  for (int t = 0; t < trials; ++t) {
    for (int l = 0; l < 8; ++l) {
      a[l] = fp::from_bits(g());
      b[l] = fp::from_bits(g());
      c[l] = fp::from_bits(g());
      idx[l] = std::int64_t(g() & 7);
    }
    // Mix in integral exponents and special values.
    b[0] = double(int(g.below(4400)) - 2200);
    b[1] = (g() & 1) ? inf : -inf;
    a[2] = 0.0;
    a[3] = mu;
    const E::vec ea = E::load(a), eb = E::load(b), ec = E::load(c);
    const N::vec na = N::load(a), nb = N::load(b), nc = N::load(c);
    cmp("add", E::add(ea, eb), N::add(na, nb));
    cmp("sub", E::sub(ea, eb), N::sub(na, nb));
    cmp("mul", E::mul(ea, eb), N::mul(na, nb));
    cmp("div", E::div(ea, eb), N::div(na, nb));
    cmp("sqrt", E::sqrt(ea), N::sqrt(na));
    cmp("fmadd", E::fmadd(ea, eb, ec), N::fmadd(na, nb, nc));
    cmp("fmsub", E::fmsub(ea, eb, ec), N::fmsub(na, nb, nc));
    cmp("fnmadd", E::fnmadd(ea, eb, ec), N::fnmadd(na, nb, nc));
    cmp("min", E::min(ea, eb), N::min(na, nb));
    cmp("max", E::max(ea, eb), N::max(na, nb));
    cmp("scalef", E::scalef(ea, eb), N::scalef(na, nb));
    cmp("getexp", E::getexp(ea), N::getexp(na));
    cmp("getmant", E::getmant(ea), N::getmant(na));
    cmp("abs", E::abs(ea), N::abs(na));
    cmp("sign", E::sign(ea), N::sign(na));
    cmp("lsb", E::lsb(eb), N::lsb(nb));
    cmp("or_", E::or_(ea, eb), N::or_(na, nb));
    cmp("and_", E::and_(ea, eb), N::and_(na, nb));
    cmp("xor_", E::xor_(ea, eb), N::xor_(na, nb));
    cmp("andnot", E::andnot(ea, eb), N::andnot(na, nb));
    const LaneMask m = LaneMask(g() & 0xff);
    cmp("blend", E::blend(m, ea, eb), N::blend(m, na, nb));
    cmp("compress", E::compress(m, ea), N::compress(m, na));
    cmp("permute", E::permute(idx, ea), N::permute(idx, na));
    bad["cmp_lt"] += E::cmp_lt(ea, eb) != N::cmp_lt(na, nb);
    bad["cmp_le"] += E::cmp_le(ea, eb) != N::cmp_le(na, nb);
    bad["cmp_eq"] += E::cmp_eq(ea, eb) != N::cmp_eq(na, nb);
    bad["reduce_add"] += !same_value(E::reduce_add(ea), N::reduce_add(na));
    bad["reduce_max"] += !same_value(E::reduce_max(ea), N::reduce_max(na));
  }
  for (const auto& [op, count] : bad) {
    INFO(op);
    CHECK(count == 0);
  }
}

}  // TEST_SUITE
