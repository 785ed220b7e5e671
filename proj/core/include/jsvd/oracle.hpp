#pragma once
// Reference arithmetic and error measures. Everything here is evaluated in
// double-double and is meant for verification, not speed.

#include <cstddef>
#include <vector>

#include "jsvd/ddouble.hpp"
#include "jsvd/efnorm.hpp"
#include "jsvd/evd2.hpp"
#include "jsvd/splitform.hpp"

namespace jsvd {

// Named error-bound constants (multiples of eps = 2^-53).
struct ErrorBounds {
  static constexpr double alpha = 4.000001;
  static constexpr double tan_real = 5.500001;
  static constexpr double tan_complex = 11.500004;
  static constexpr double cos_real = 8.000002;
  static constexpr double cos_complex = 14.000006;
  static constexpr double eps_tilde = 3.000001;
  static constexpr double eps_tilde2 = 5.656856;
};

// xLAEV2-style output: |rt1| >= |rt2|, (cs1, sn1) the unit eigenvector of rt1.
struct RefEVD {
  double rt1 = 0, rt2 = 0, cs1 = 1, sn1_re = 0, sn1_im = 0;
};

// Straight port of the reference DLAEV2 for [[a, b], [b, c]].
RefEVD ref_evd2_real(double a, double b, double c);
// ZLAEV2 taking the (2,1) element b21 = conj(B) instead of B.
RefEVD ref_evd2(double a, double b21_re, double b21_im, double c);

DD quad_dot(const double* x, const double* y, std::size_t n);

// Value f * 2^e with f a double-double; avoids overflow for any finite input.
struct QuadNorm {
  DD f;
  int e = 0;
  double to_double() const { return std::ldexp(f.hi, e) + std::ldexp(f.lo, e); }
};
QuadNorm quad_norm(const double* x, std::size_t n);
QuadNorm quad_norm_complex(const double* re, const double* im, std::size_t n);
// |x / ref - 1| with 0/0 = 0.
double rel_error(const EFNumber& x, const QuadNorm& ref);

struct SVDErrors {
  double r_G = 0, r_U = 0, r_V = 0, r_Sigma = 0;
  // Squared Frobenius norms of U*U - I and V*V - I, reported alongside.
  double r_U_sq = 0, r_V_sq = 0;
};

// sigma_ref in any order; both sides are compared sorted non-increasingly.
SVDErrors error_measures(const SplitMatrix& G, const SplitMatrix& U, const SplitMatrix& V,
                         const std::vector<EFNumber>& sigma, const std::vector<double>& sigma_ref,
                         unsigned workers = 1);

// ||c^2 + |s|^2| - 1|.
double det_residual(double c, double s_re, double s_im);

// rho = ||U diag(l1, l2) U^* - A||_F / ||A||_F with U = [[c, -conj(s)], [s, c]].
double evd_residual(double a11, double a22, double a21_re, double a21_im, double c, double s_re,
                    double s_im, double l1, double l2);

struct EvdCompare {
  std::size_t count = 0;
  double rho_kernel = 0, rho_ref = 0;
  double delta_kernel = 0, delta_ref = 0;
  double lamF_kernel = 0, lamF_ref = 0;
  double lamMax_kernel = 0, lamMax_ref = 0;
};

// Batch maxima for the kernel (which must carry sines) and the reference
// routine, against prescribed eigenvalues lam1/lam2 (may be empty).
EvdCompare ref_evd2_batch_compare(const HermBatch2& batch, const EVDOut2& kernel,
                                  const std::vector<RefEVD>& ref, const std::vector<double>& lam1,
                                  const std::vector<double>& lam2, std::size_t begin = 0,
                                  std::size_t end = std::size_t(-1));

std::vector<RefEVD> ref_evd2_batch(const HermBatch2& batch);

}  // namespace jsvd
