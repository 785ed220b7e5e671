#pragma once
// Test inputs: 2x2 Hermitian batches with prescribed eigenvalues and square
// matrices with prescribed, logarithmically equidistributed singular values.
// Everything is assembled in double-double and rounded once.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "jsvd/ddouble.hpp"
#include "jsvd/evd2.hpp"
#include "jsvd/splitform.hpp"

namespace jsvd {

enum class SpectrumOrder { ascending, descending, random };
SpectrumOrder parse_order(const std::string& name);
const char* order_name(SpectrumOrder o);

struct SpectrumSpec {
  int xi = -23;
  std::size_t n = 128;
  SpectrumOrder perm = SpectrumOrder::random;
};

// sigma_i = 2^(xi (1 - (i-1)/(n-1))), i = 1..n, in the requested order.
std::vector<double> spectrum(const SpectrumSpec& spec, std::uint64_t seed);

// Elements of U diag(l1, l2) U^* for U with tan(phi) = t (|t| <= 1, its sign
// moved into exp(i alpha)) and cos(alpha) = ca. Real when !complex.
struct Elements2 {
  double a11 = 0, a22 = 0, re = 0, im = 0;
};
Elements2 assemble2x2(double l1, double l2, const DD& t, double ca, bool complex);

struct Gen2x2 {
  HermBatch2 batch;
  std::vector<double> lam1, lam2;
};
// Matrix j draws from the stream (seed, j). A real batch reuses the draws of
// the complex one with cos(alpha) = 1.
Gen2x2 gen2x2_batch(std::size_t r, std::uint64_t seed, bool complex, std::size_t s = 8);

struct GenSVD {
  SplitMatrix G;
  std::vector<double> sigma;  // as placed on the diagonal before the transforms
};
// G = Q1 diag(sigma) Q2^* with Q1, Q2 random orthogonal/unitary, each a
// product of n-1 Householder reflectors and a random sign/phase diagonal.
GenSVD gen_svd_matrix(const SpectrumSpec& spec, std::uint64_t seed, bool complex, std::size_t s = 8,
                      unsigned workers = 1);

// Sidecars. Eigenvalues: "JSVDLAM2", u64 r, lam1[r], lam2[r]. Singular
// values: CSV with one "j,sigma" row per value, %.17g.
void write_lambdas(const std::string& path, const std::vector<double>& lam1,
                   const std::vector<double>& lam2);
void read_lambdas(const std::string& path, std::vector<double>& lam1, std::vector<double>& lam2);
void write_sigma_csv(const std::string& path, const std::vector<double>& sigma,
                     const std::string& header = "");
std::vector<double> read_sigma_csv(const std::string& path);

}  // namespace jsvd
