#pragma once

#include "tpsim/common.hpp"
#include "tpsim/stat/rng.hpp"

#include <vector>

namespace tpsim::stat {

// Least-squares fit with rank detection. Aliased (linearly dependent)
// columns have their coefficient pinned to zero and the corresponding
// rows/columns of xtx_inverse zeroed; xtx_inverse is the inverse of
// X'X restricted to the identified column subspace.
struct LsFit {
  Vector coefficients;
  double residual_variance = 0.0;  // RSS / (n_used - rank)
  Matrix xtx_inverse;
  Index rank = 0;
  Index n_used = 0;
  std::vector<bool> aliased;
  bool degenerate = false;  // exact fit, residual_variance ~ 0

  Index residual_df() const { return n_used - rank; }
};

/// OLS via column-pivoted QR; rank tolerance 1e-10 relative to the
/// largest column norm. Throws InsufficientData when no residual
/// degrees of freedom remain (n_used <= rank).
LsFit ols_fit(const Matrix& design, const Vector& response);

struct RegressionDraw {
  Vector coefficients;
  double sigma = 0.0;
};

/// Posterior draw of (coefficients, sigma) under the standard
/// noninformative reference prior: sigma^2 from a scaled inverse
/// chi-square, coefficients from N(fit, sigma^2 * xtx_inverse).
RegressionDraw bayes_regression_draw(const LsFit& fit, RngStream& rng);

}  // namespace tpsim::stat
