#pragma once

#include "tpsim/analyze/estimates.hpp"
#include "tpsim/trial/scenario.hpp"

#include <array>
#include <vector>

namespace tpsim::analyze {

struct MmrmFit {
  EstimateTriple estimates;  // final timepoint, mL
  Matrix sigma;              // fitted unstructured covariance (litres^2)
  Vector chol_params;        // optimizer solution (6 entries, row-major lower triangle)
  double log_likelihood = 0.0;
  bool converged = false;
  bool singular = false;  // a Cholesky diagonal sat at the 1e-6 floor
  Index n_subjects_used = 0;
};

// REML problem for the repeated-measures model with saturated-in-time
// fixed effects (per-timepoint intercept, treatment and baseline slope)
// and one unstructured 3x3 covariance shared by the arms. Monotone
// missingness means each subject contributes an observed prefix of
// Y1..Y3; subjects with no post-baseline data drop out. The likelihood is
// evaluated from per-prefix moment matrices, so its cost does not grow
// with n.
class MmrmProblem {
 public:
  MmrmProblem(const Matrix& outcomes, const std::vector<trial::Arm>& arm);

  /// Profiled REML log-likelihood at the given Cholesky parameters
  /// (L00, L10, L11, L20, L21, L22; diagonals floored at 1e-6 in
  /// magnitude).
  double reml_loglik(const Vector& chol_params) const;

  MmrmFit fit() const;

  Index n_subjects_used() const { return n_used_; }

  static Matrix sigma_from_params(const Vector& chol_params);

 private:
  std::array<double, 3> prefix_count_{};   // subjects per observed prefix length
  std::array<Matrix, 3> covariate_moments_;  // sum of c c' per prefix, c = (1, trt, y0)
  std::array<Matrix, 3> cross_moments_;      // sum of c y' per prefix (y zero-padded)
  std::array<Matrix, 3> response_moments_;   // sum of y y' per prefix
  double baseline_mean_ = 0.0;
  Index n_used_ = 0;
  Index n_observations_ = 0;
  Vector start_params_;

  struct GlsParts {
    Matrix xtwx;   // 9x9
    Vector xtwy;   // 9
    double ytwy = 0.0;
    double logdet_sigma_sum = 0.0;
  };
  GlsParts assemble(const Matrix& sigma) const;
};

/// Fits the MMRM on available data and reports the final-timepoint
/// contrast and baseline-adjusted marginal mean changes.
MmrmFit mmrm(const Matrix& outcomes, const std::vector<trial::Arm>& arm);

}  // namespace tpsim::analyze
