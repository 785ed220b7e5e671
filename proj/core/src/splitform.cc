#include "jsvd/splitform.hpp"

#include <cmath>
#include <stdexcept>

#include "jsvd/binio.hpp"

namespace jsvd {

namespace {

void check_s(std::size_t s) {
  if (s == 0 || (s & (s - 1)) != 0) throw std::invalid_argument("lane count must be a power of two");
}

constexpr char kMatMagic[9] = "JSVDMAT1";

}  // namespace

std::size_t pad_length(std::size_t m, std::size_t s) {
  const std::size_t r = m % s;
  return r == 0 ? m : m + (s - r);
}

SplitMatrix SplitMatrix::zeros(std::size_t m, std::size_t n, bool complex, std::size_t s) {
  check_s(s);
  SplitMatrix x;
  x.m = m;
  x.m_tilde = pad_length(m, s);
  x.n = n;
  x.s = s;
  x.complex = complex;
  x.re.assign(x.m_tilde * n, 0.0);
  if (complex) x.im.assign(x.m_tilde * n, 0.0);
  return x;
}

SplitMatrix SplitMatrix::identity(std::size_t n, bool complex, std::size_t s) {
  SplitMatrix x = zeros(n, n, complex, s);
  for (std::size_t j = 0; j < n; ++j) x.re_at(j, j) = 1.0;
  return x;
}

bool SplitMatrix::padding_is_zero() const {
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = m; i < m_tilde; ++i)
      if (re_at(i, j) != 0.0 || im_at(i, j) != 0.0) return false;
  return true;
}

bool SplitMatrix::all_finite() const {
  for (double v : re)
    if (!std::isfinite(v)) return false;
  for (double v : im)
    if (!std::isfinite(v)) return false;
  return true;
}

SplitMatrix split_columns(const std::complex<double>* a, std::size_t lda, std::size_t m,
                          std::size_t n, std::size_t s) {
  if (lda < m) throw std::invalid_argument("leading dimension smaller than row count");
  SplitMatrix x = SplitMatrix::zeros(m, n, true, s);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::complex<double> z = a[j * lda + i];
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::invalid_argument("non-finite entry at (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
      x.re_at(i, j) = z.real();
      x.im_at(i, j) = z.imag();
    }
  }
  return x;
}

SplitMatrix split_columns_real(const double* a, std::size_t lda, std::size_t m, std::size_t n,
                               std::size_t s) {
  if (lda < m) throw std::invalid_argument("leading dimension smaller than row count");
  SplitMatrix x = SplitMatrix::zeros(m, n, false, s);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const double v = a[j * lda + i];
      if (!std::isfinite(v))
        throw std::invalid_argument("non-finite entry at (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
      x.re_at(i, j) = v;
    }
  }
  return x;
}

std::vector<std::complex<double>> merge_columns(const SplitMatrix& x) {
  std::vector<std::complex<double>> out(x.m * x.n);
  for (std::size_t j = 0; j < x.n; ++j)
    for (std::size_t i = 0; i < x.m; ++i) out[j * x.m + i] = {x.re_at(i, j), x.im_at(i, j)};
  return out;
}

void write_split(const std::string& path, const SplitMatrix& x) {
  binio::Writer w(path);
  w.bytes(kMatMagic, 8);
  w.put<std::uint64_t>(x.m);
  w.put<std::uint64_t>(x.n);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(x.s));
  w.put<std::uint32_t>(x.complex ? 1u : 0u);
  w.doubles(x.re.data(), x.re.size());
  if (x.complex) w.doubles(x.im.data(), x.im.size());
}

SplitMatrix read_split(const std::string& path) {
  binio::Reader r(path);
  r.expect_magic(kMatMagic);
  const auto m = r.get<std::uint64_t>();
  const auto n = r.get<std::uint64_t>();
  const auto s = r.get<std::uint32_t>();
  const auto flags = r.get<std::uint32_t>();
  if (s == 0 || (s & (s - 1)) != 0 || s > 32) throw std::runtime_error("bad lane count in " + path);
  if (m > (1ull << 32) || n > (1ull << 32)) throw std::runtime_error("implausible dimensions in " + path);
  SplitMatrix x = SplitMatrix::zeros(m, n, (flags & 1u) != 0, s);
  r.doubles(x.re.data(), x.re.size());
  if (x.complex) r.doubles(x.im.data(), x.im.size());
  if (!x.padding_is_zero()) throw std::runtime_error("nonzero padding rows in " + path);
  return x;
}

}  // namespace jsvd
