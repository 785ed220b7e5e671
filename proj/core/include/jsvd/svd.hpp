#pragma once
// One-sided Jacobi SVD, real and complex, built on the batched 2x2 EVD.
//
// The iteration matrix G is kept at a power-of-two scaling 2^s of the input
// so that no element or column norm can overflow; singular values come out
// in the (e, f) representation and are backscaled exactly at the end.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "jsvd/efnorm.hpp"
#include "jsvd/lanes.hpp"
#include "jsvd/splitform.hpp"
#include "jsvd/strategy.hpp"

namespace jsvd {

// Raised for inputs the method cannot handle (infinite or NaN max-norm,
// a zero column, an unrecoverable norm overflow).
struct numerical_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SVDConfig {
  std::size_t max_sweeps = 30;
  StrategyKind strategy = StrategyKind::rr;
  unsigned workers = 1;
  std::size_t s = 8;
  bool gram_schmidt = true;  // real inputs only
  bool sort = true;          // order the output by non-increasing sigma
  // Test hooks. A column whose max |element| exceeds norm_overflow_above is
  // treated as having an overflowing norm; initial_scale_bias is added to
  // the initial scaling exponent.
  double norm_overflow_above = FloatEnv::inf;
  int initial_scale_bias = 0;
};

struct PhaseTimes {
  double rescale = 0, norms = 0, dots = 0, gram = 0, evd = 0, rotate = 0, finalize = 0;
  double total() const { return rescale + norms + dots + gram + evd + rotate + finalize; }
};

struct SVDResult {
  SplitMatrix U;  // m x n
  SplitMatrix V;  // n x n
  std::vector<EFNumber> sigma;
  std::size_t sweeps = 0;  // C; equals max_sweeps iff not converged
  bool converged = false;
  std::vector<std::size_t> sweep_T;  // transformations per sweep
  PhaseTimes times;
  long s0 = 0;       // initial scaling exponent
  long s_final = 0;  // accumulated scaling exponent at the end
  std::size_t rescalings = 0;
  std::size_t overflow_retries = 0;
  std::size_t gs_steps = 0;  // Gram-Schmidt replacements of a rotation
  std::size_t n_bordered = 0;  // column count after bordering
};

// floor(lg(omega / (2m))) for real, floor(lg(omega / (4 m sqrt 2))) for complex.
int scale_bound(std::size_t m, bool complex);

struct StepScaling {
  long paren;    // headroom before a possibly destructive step; < 0 triggers a rescale
  long bracket;  // exponent that brings M~ just under the bound
};
StepScaling step_scaling(double M_tilde, std::size_t m, bool complex);

struct ScalingState {
  long s = 0;
  double M_tilde = 0;
};
// Scales G in place by 2^s0. Throws numerical_failure for a NaN, infinite or
// zero max-norm.
ScalingState initial_scale(SplitMatrix& G, std::size_t m, int bias = 0);

// Requires m >= n >= 1. Bordering to a multiple of 2s columns is internal.
SVDResult svd_run(const SplitMatrix& G, const SVDConfig& cfg = {});

}  // namespace jsvd
