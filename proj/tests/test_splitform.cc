#include <doctest.h>

#include <complex>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "helpers.hpp"
#include "jsvd/splitform.hpp"

using namespace jsvd;
using cd = std::complex<double>;

TEST_SUITE("splitform") {

TEST_CASE("pad_length") {
  CHECK(pad_length(10, 8) == 16);
  CHECK(pad_length(16, 8) == 16);
  CHECK(pad_length(0, 8) == 0);
  CHECK(pad_length(3, 2) == 4);
}

TEST_CASE("split a complex column") {
  const std::vector<cd> a{{1, 2}, {3, 4}, {5, 6}, {7, 8}};
  const SplitMatrix x = split_columns(a.data(), 4, 4, 1, 4);
  CHECK(x.m_tilde == 4);
  CHECK(std::vector<double>(x.re.begin(), x.re.end()) == std::vector<double>{1, 3, 5, 7});
  CHECK(std::vector<double>(x.im.begin(), x.im.end()) == std::vector<double>{2, 4, 6, 8});
}

TEST_CASE("real parts only give a zero imaginary plane") {
  const std::vector<cd> a{{1, 0}, {-2, 0}, {3, 0}};
  const SplitMatrix x = split_columns(a.data(), 3, 3, 1);
  for (double v : x.im) CHECK(v == 0.0);
}

TEST_CASE("columns are padded with zeros") {
  std::vector<cd> a(5, cd(1, 1));
  const SplitMatrix x = split_columns(a.data(), 5, 5, 1, 8);
  REQUIRE(x.re.size() == 8);
  for (int i = 5; i < 8; ++i) CHECK((x.re[i] == 0.0 && x.im[i] == 0.0));
  CHECK(x.padding_is_zero());
}

TEST_CASE("merge inverts split") {
  SplitMix64 g(5);
  const std::size_t m = 13, n = 7, lda = 15;
  std::vector<cd> a(lda * n);
  for (auto& z : a) z = {test::random_finite(g), test::random_finite(g)};
  const SplitMatrix x = split_columns(a.data(), lda, m, n);
  const auto b = merge_columns(x);
  REQUIRE(b.size() == m * n);
  bool same = true;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i)
      same = same && test::same_bits(b[j * m + i].real(), a[j * lda + i].real()) &&
             test::same_bits(b[j * m + i].imag(), a[j * lda + i].imag());
  CHECK(same);
}

TEST_CASE("merge of small and zero matrices") {
  SplitMatrix x = SplitMatrix::zeros(1, 1, true);
  x.re_at(0, 0) = 1.0;
  CHECK(merge_columns(x) == std::vector<cd>{cd(1, 0)});
  const SplitMatrix z = SplitMatrix::zeros(3, 2, true);
  for (const cd& v : merge_columns(z)) CHECK(v == cd(0, 0));
}

TEST_CASE("non-finite input is rejected") {
  std::vector<cd> a{{1, 0}, {std::nan(""), 0}};
  CHECK_THROWS_AS(split_columns(a.data(), 2, 2, 1), std::invalid_argument);
  std::vector<double> r{1.0, test::inf};
  CHECK_THROWS_AS(split_columns_real(r.data(), 2, 2, 1), std::invalid_argument);
}

TEST_CASE("binary file round trip") {
  SplitMix64 g(6);
  SplitMatrix x = SplitMatrix::zeros(9, 3, true, 4);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 9; ++i) {
      x.re_at(i, j) = test::random_unit(g);
      x.im_at(i, j) = test::random_unit(g);
    }
  const auto path = std::filesystem::temp_directory_path() / "jsvd_split_roundtrip.bin";
  write_split(path.string(), x);
  const SplitMatrix y = read_split(path.string());
  std::filesystem::remove(path);
  CHECK(y.m == 9);
  CHECK(y.n == 3);
  CHECK(y.s == 4);
  CHECK(y.complex);
  CHECK(std::equal(x.re.begin(), x.re.end(), y.re.begin(), y.re.end()));
  CHECK(std::equal(x.im.begin(), x.im.end(), y.im.begin(), y.im.end()));
  CHECK_THROWS(read_split("/nonexistent/jsvd.bin"));
}

}  // TEST_SUITE
