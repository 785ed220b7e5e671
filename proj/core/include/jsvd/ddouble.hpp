#pragma once
// Double-double arithmetic (about 106 significant bits) for the reference
// computations. Not for use inside the kernels.

#include <cmath>
#include <complex>

namespace jsvd {

struct DD {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DD() = default;
  constexpr DD(double h) : hi(h), lo(0.0) {}
  constexpr DD(double h, double l) : hi(h), lo(l) {}

  double to_double() const { return hi + lo; }
};

namespace dd {

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}
inline DD fast_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}
inline DD two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace dd

inline DD operator-(const DD& a) { return {-a.hi, -a.lo}; }

inline DD operator+(const DD& a, const DD& b) {
  DD s = dd::two_sum(a.hi, b.hi);
  const DD t = dd::two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = dd::fast_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return dd::fast_two_sum(s.hi, s.lo);
}
inline DD operator-(const DD& a, const DD& b) { return a + (-b); }

inline DD operator*(const DD& a, const DD& b) {
  DD p = dd::two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return dd::fast_two_sum(p.hi, p.lo);
}

inline DD operator/(const DD& a, const DD& b) {
  const double q1 = a.hi / b.hi;
  DD r = a - b * DD(q1);
  const double q2 = r.hi / b.hi;
  r = r - b * DD(q2);
  const double q3 = r.hi / b.hi;
  return DD(dd::fast_two_sum(q1, q2)) + DD(q3);
}

inline DD& operator+=(DD& a, const DD& b) { return a = a + b; }
inline DD& operator-=(DD& a, const DD& b) { return a = a - b; }
inline DD& operator*=(DD& a, const DD& b) { return a = a * b; }
inline DD& operator/=(DD& a, const DD& b) { return a = a / b; }

inline bool operator<(const DD& a, const DD& b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(const DD& a, const DD& b) { return b < a; }
inline bool operator<=(const DD& a, const DD& b) { return !(b < a); }
inline bool operator>=(const DD& a, const DD& b) { return !(a < b); }
inline bool operator==(const DD& a, const DD& b) { return a.hi == b.hi && a.lo == b.lo; }

inline DD abs(const DD& a) { return a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0) ? -a : a; }

// One Newton step on the binary64 root; exact enough for 2^-104.
inline DD sqrt(const DD& a) {
  if (a.hi <= 0.0) return DD(0.0);
  const double x = std::sqrt(a.hi);
  const DD r = a - dd::two_prod(x, x);
  return dd::fast_two_sum(x, r.hi / (2.0 * x));
}

inline DD ldexp(const DD& a, int e) { return {std::ldexp(a.hi, e), std::ldexp(a.lo, e)}; }

inline DD sq(const DD& a) { return a * a; }

// Complex double-double, for reference evaluations only.
struct CDD {
  DD re, im;
};
inline CDD operator+(const CDD& a, const CDD& b) { return {a.re + b.re, a.im + b.im}; }
inline CDD operator-(const CDD& a, const CDD& b) { return {a.re - b.re, a.im - b.im}; }
inline CDD operator*(const CDD& a, const CDD& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline CDD conj(const CDD& a) { return {a.re, -a.im}; }
inline DD norm2(const CDD& a) { return a.re * a.re + a.im * a.im; }

}  // namespace jsvd
