#pragma once
#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "jsvd/aligned.hpp"

namespace jsvd {

std::size_t pad_length(std::size_t m, std::size_t s);

// Column-major m_tilde x n planes. Rows m..m_tilde-1 are zero in every
// column. Real matrices leave `im` empty.
struct SplitMatrix {
  std::size_t m = 0;
  std::size_t m_tilde = 0;
  std::size_t n = 0;
  std::size_t s = 8;
  bool complex = false;
  AlignedVec re;
  AlignedVec im;

  static SplitMatrix zeros(std::size_t m, std::size_t n, bool complex, std::size_t s = 8);
  static SplitMatrix identity(std::size_t n, bool complex, std::size_t s = 8);

  double* re_col(std::size_t j) { return re.data() + j * m_tilde; }
  const double* re_col(std::size_t j) const { return re.data() + j * m_tilde; }
  double* im_col(std::size_t j) { return complex ? im.data() + j * m_tilde : nullptr; }
  const double* im_col(std::size_t j) const { return complex ? im.data() + j * m_tilde : nullptr; }

  double& re_at(std::size_t i, std::size_t j) { return re[j * m_tilde + i]; }
  double re_at(std::size_t i, std::size_t j) const { return re[j * m_tilde + i]; }
  double& im_at(std::size_t i, std::size_t j) { return im[j * m_tilde + i]; }
  double im_at(std::size_t i, std::size_t j) const { return complex ? im[j * m_tilde + i] : 0.0; }

  bool padding_is_zero() const;
  bool all_finite() const;
};

// Interleaved column-major input with leading dimension lda >= m.
// Throws std::invalid_argument on a non-finite entry.
SplitMatrix split_columns(const std::complex<double>* a, std::size_t lda, std::size_t m,
                          std::size_t n, std::size_t s = 8);
SplitMatrix split_columns_real(const double* a, std::size_t lda, std::size_t m, std::size_t n,
                               std::size_t s = 8);

// Logical m x n block, column-major, lda = m.
std::vector<std::complex<double>> merge_columns(const SplitMatrix& x);

// Binary format: "JSVDMAT1", u64 m, u64 n, u32 s, u32 flags (bit 0 complex),
// then the padded re plane and, for complex data, the im plane. Little-endian.
void write_split(const std::string& path, const SplitMatrix& x);
SplitMatrix read_split(const std::string& path);

}  // namespace jsvd
