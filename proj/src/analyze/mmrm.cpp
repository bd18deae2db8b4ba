#include "tpsim/analyze/mmrm.hpp"

#include "tpsim/stat/ols.hpp"
#include "tpsim/stat/optimize.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace tpsim::analyze {

namespace {

constexpr double kDiagFloor = 1e-6;
constexpr int kFixedEffects = 9;  // (intercept, treatment, baseline) x 3 timepoints

// Column layout: block * 3 + (timepoint - 1), blocks 0=intercept,
// 1=treatment, 2=baseline.
int col_of(int block, int timepoint) { return block * 3 + timepoint - 1; }

}  // namespace

MmrmProblem::MmrmProblem(const Matrix& outcomes, const std::vector<trial::Arm>& arm) {
  const Index n = outcomes.rows();
  if (static_cast<Index>(arm.size()) != n) {
    throw Error("mmrm: arm vector must match outcome rows");
  }
  for (auto& m : covariate_moments_) m = Matrix::Zero(3, 3);
  for (auto& m : cross_moments_) m = Matrix::Zero(3, 3);
  for (auto& m : response_moments_) m = Matrix::Zero(3, 3);

  double baseline_sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (std::isnan(outcomes(i, 0))) {
      throw Error("mmrm: baseline missing at row " + std::to_string(i));
    }
    int prefix = 0;
    for (int j = 1; j <= 3; ++j) {
      if (std::isnan(outcomes(i, j))) break;
      prefix = j;
    }
    for (int j = prefix + 1; j <= 3; ++j) {
      if (!std::isnan(outcomes(i, j))) {
        throw Error("mmrm: non-monotone missingness at row " + std::to_string(i));
      }
    }
    if (prefix == 0) continue;

    Vector c(3);
    c << 1.0, arm[static_cast<std::size_t>(i)] == trial::Arm::Active ? 1.0 : 0.0,
        outcomes(i, 0);
    Vector y = Vector::Zero(3);
    for (int j = 1; j <= prefix; ++j) y(j - 1) = outcomes(i, j);

    auto& count = prefix_count_[static_cast<std::size_t>(prefix - 1)];
    count += 1.0;
    covariate_moments_[static_cast<std::size_t>(prefix - 1)] += c * c.transpose();
    cross_moments_[static_cast<std::size_t>(prefix - 1)] += c * y.transpose();
    response_moments_[static_cast<std::size_t>(prefix - 1)] += y * y.transpose();
    baseline_sum += outcomes(i, 0);
    ++n_used_;
    n_observations_ += prefix;
  }
  if (n_used_ <= kFixedEffects) {
    throw InsufficientData("mmrm: needs more subjects than fixed effects");
  }
  baseline_mean_ = baseline_sum / static_cast<double>(n_used_);

  // Start from the diagonal of per-timepoint OLS residual variances.
  start_params_ = Vector::Zero(6);
  const int diag_pos[3] = {0, 2, 5};
  for (int t = 1; t <= 3; ++t) {
    std::vector<Index> rows;
    for (Index i = 0; i < n; ++i) {
      if (!std::isnan(outcomes(i, t))) rows.push_back(i);
    }
    Matrix x(static_cast<Index>(rows.size()), 3);
    Vector y(static_cast<Index>(rows.size()));
    for (Index r = 0; r < static_cast<Index>(rows.size()); ++r) {
      const Index i = rows[static_cast<std::size_t>(r)];
      x(r, 0) = 1.0;
      x(r, 1) = arm[static_cast<std::size_t>(i)] == trial::Arm::Active ? 1.0 : 0.0;
      x(r, 2) = outcomes(i, 0);
      y(r) = outcomes(i, t);
    }
    const stat::LsFit fit = stat::ols_fit(x, y);
    start_params_(diag_pos[t - 1]) =
        std::sqrt(std::max(fit.residual_variance, kDiagFloor));
  }
}

Matrix MmrmProblem::sigma_from_params(const Vector& chol_params) {
  if (chol_params.size() != 6) {
    throw Error("mmrm: expected 6 Cholesky parameters");
  }
  Matrix lower = Matrix::Zero(3, 3);
  lower(0, 0) = chol_params(0);
  lower(1, 0) = chol_params(1);
  lower(1, 1) = chol_params(2);
  lower(2, 0) = chol_params(3);
  lower(2, 1) = chol_params(4);
  lower(2, 2) = chol_params(5);
  for (int i = 0; i < 3; ++i) {
    if (std::fabs(lower(i, i)) < kDiagFloor) {
      lower(i, i) = lower(i, i) < 0.0 ? -kDiagFloor : kDiagFloor;
    }
  }
  return lower * lower.transpose();
}

MmrmProblem::GlsParts MmrmProblem::assemble(const Matrix& sigma) const {
  GlsParts parts;
  parts.xtwx = Matrix::Zero(kFixedEffects, kFixedEffects);
  parts.xtwy = Vector::Zero(kFixedEffects);

  for (int p = 1; p <= 3; ++p) {
    const double count = prefix_count_[static_cast<std::size_t>(p - 1)];
    if (count == 0.0) continue;
    const Matrix sub = sigma.topLeftCorner(p, p);
    const double det = sub.determinant();
    if (!(det > 0.0)) {
      parts.logdet_sigma_sum = std::numeric_limits<double>::quiet_NaN();
      return parts;
    }
    Matrix w = Matrix::Zero(3, 3);
    w.topLeftCorner(p, p) = sub.inverse();
    parts.logdet_sigma_sum += count * std::log(det);

    const Matrix& mom = covariate_moments_[static_cast<std::size_t>(p - 1)];
    const Matrix& cross = cross_moments_[static_cast<std::size_t>(p - 1)];
    const Matrix& resp = response_moments_[static_cast<std::size_t>(p - 1)];
    for (int b = 0; b < 3; ++b) {
      for (int b2 = 0; b2 < 3; ++b2) {
        for (int t = 0; t < 3; ++t) {
          for (int t2 = 0; t2 < 3; ++t2) {
            parts.xtwx(b * 3 + t, b2 * 3 + t2) += mom(b, b2) * w(t, t2);
          }
        }
      }
    }
    const Matrix cw = cross * w;
    for (int b = 0; b < 3; ++b) {
      for (int t = 0; t < 3; ++t) parts.xtwy(b * 3 + t) += cw(b, t);
    }
    parts.ytwy += (w * resp).trace();
  }
  return parts;
}

double MmrmProblem::reml_loglik(const Vector& chol_params) const {
  const Matrix sigma = sigma_from_params(chol_params);
  const GlsParts parts = assemble(sigma);
  if (!std::isfinite(parts.logdet_sigma_sum)) {
    return -std::numeric_limits<double>::infinity();
  }
  Eigen::LLT<Matrix> llt(parts.xtwx);
  if (llt.info() != Eigen::Success) {
    return -std::numeric_limits<double>::infinity();
  }
  const Vector beta = llt.solve(parts.xtwy);
  double logdet_xtwx = 0.0;
  const Matrix l = llt.matrixL();
  for (int i = 0; i < kFixedEffects; ++i) logdet_xtwx += 2.0 * std::log(l(i, i));

  const double quad = parts.ytwy - beta.dot(parts.xtwy);
  const double constant =
      -0.5 * static_cast<double>(n_observations_ - kFixedEffects) *
      std::log(2.0 * M_PI);
  return -0.5 * (parts.logdet_sigma_sum + quad + logdet_xtwx) + constant;
}

MmrmFit MmrmProblem::fit() const {
  // Optimize the per-observation likelihood so the relative gradient
  // tolerance is independent of the sample size.
  const double scale = static_cast<double>(n_observations_);
  const auto objective = [this, scale](const Vector& params) {
    return reml_loglik(params) / scale;
  };
  stat::OptimResult opt = stat::maximize(objective, start_params_);
  for (int attempt = 0; attempt < 2 && !opt.converged; ++attempt) {
    opt = stat::maximize(objective, opt.argmax);
  }

  MmrmFit result;
  result.chol_params = opt.argmax;
  result.converged = opt.converged;
  result.log_likelihood = reml_loglik(opt.argmax);
  result.sigma = sigma_from_params(opt.argmax);
  result.n_subjects_used = n_used_;
  for (int i : {0, 2, 5}) {
    if (std::fabs(opt.argmax(i)) <= kDiagFloor * (1.0 + 1e-9)) result.singular = true;
  }

  const GlsParts parts = assemble(result.sigma);
  Eigen::LLT<Matrix> llt(parts.xtwx);
  if (llt.info() != Eigen::Success) {
    throw Error("mmrm: singular information matrix at the optimum");
  }
  const Matrix cov = llt.solve(Matrix::Identity(kFixedEffects, kFixedEffects));
  const Vector beta = llt.solve(parts.xtwy);
  const double df = static_cast<double>(n_used_ - kFixedEffects);

  auto component = [&](const Vector& contrast, double shift) {
    Component out;
    out.point = 1000.0 * (contrast.dot(beta) + shift);
    out.variance = 1e6 * contrast.dot(cov * contrast);
    out.df = df;
    return out;
  };

  Vector control = Vector::Zero(kFixedEffects);
  control(col_of(0, 3)) = 1.0;
  control(col_of(2, 3)) = baseline_mean_;
  Vector active = control;
  active(col_of(1, 3)) = 1.0;
  Vector effect = Vector::Zero(kFixedEffects);
  effect(col_of(1, 3)) = 1.0;

  result.estimates.mean_change_control = component(control, -baseline_mean_);
  result.estimates.mean_change_active = component(active, -baseline_mean_);
  result.estimates.effect = component(effect, 0.0);
  return result;
}

MmrmFit mmrm(const Matrix& outcomes, const std::vector<trial::Arm>& arm) {
  return MmrmProblem(outcomes, arm).fit();
}

}  // namespace tpsim::analyze
