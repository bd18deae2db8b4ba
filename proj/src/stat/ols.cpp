#include "tpsim/stat/ols.hpp"

#include "tpsim/stat/linalg.hpp"

#include <Eigen/QR>

#include <cmath>

namespace tpsim::stat {

LsFit ols_fit(const Matrix& design, const Vector& response) {
  if (design.rows() != response.size()) {
    throw Error("ols_fit: design rows must match response length");
  }
  const Index n = design.rows();
  const Index p = design.cols();
  if (n == 0 || p == 0) {
    throw EmptyDesign("ols_fit: empty design");
  }

  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  qr.setThreshold(1e-10);
  const Index rank = qr.rank();
  if (n <= rank) {
    throw InsufficientData("ols_fit: no residual degrees of freedom (n=" +
                           std::to_string(n) + ", rank=" + std::to_string(rank) + ")");
  }

  LsFit fit;
  fit.rank = rank;
  fit.n_used = n;
  fit.coefficients = qr.solve(response);  // dependent columns pinned to zero
  fit.aliased.assign(static_cast<std::size_t>(p), true);
  const auto& perm = qr.colsPermutation().indices();
  for (Index k = 0; k < rank; ++k) fit.aliased[static_cast<std::size_t>(perm(k))] = false;
  for (Index j = 0; j < p; ++j) {
    if (fit.aliased[static_cast<std::size_t>(j)]) fit.coefficients(j) = 0.0;
  }

  const double rss = (response - design * fit.coefficients).squaredNorm();
  fit.residual_variance = rss / static_cast<double>(n - rank);
  fit.degenerate = fit.residual_variance <= 1e-12;

  // inv(X1'X1) = R1^{-1} R1^{-T} on the identified columns.
  const Matrix r1 = qr.matrixR().topLeftCorner(rank, rank).template triangularView<Eigen::Upper>();
  const Matrix r1_inv = r1.triangularView<Eigen::Upper>().solve(Matrix::Identity(rank, rank));
  const Matrix sub_inv = r1_inv * r1_inv.transpose();
  fit.xtx_inverse = Matrix::Zero(p, p);
  for (Index a = 0; a < rank; ++a) {
    for (Index b = 0; b < rank; ++b) {
      fit.xtx_inverse(perm(a), perm(b)) = sub_inv(a, b);
    }
  }
  return fit;
}

RegressionDraw bayes_regression_draw(const LsFit& fit, RngStream& rng) {
  const Index nu = fit.residual_df();
  if (nu < 1) {
    throw InsufficientData("bayes_regression_draw: residual df < 1");
  }
  if (fit.residual_variance <= 1e-12) {
    throw DegenerateVariance("bayes_regression_draw: residual variance below floor");
  }

  const double g = rng.chi_square(static_cast<int>(nu));
  const double sigma2 = fit.residual_variance * static_cast<double>(nu) / g;

  const Index p = fit.coefficients.size();
  std::vector<Index> identified;
  identified.reserve(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) {
    if (!fit.aliased[static_cast<std::size_t>(j)]) identified.push_back(j);
  }
  const Index r = static_cast<Index>(identified.size());
  Matrix sub(r, r);
  for (Index a = 0; a < r; ++a) {
    for (Index b = 0; b < r; ++b) {
      sub(a, b) = fit.xtx_inverse(identified[a], identified[b]);
    }
  }

  RegressionDraw draw;
  draw.sigma = std::sqrt(sigma2);
  draw.coefficients = fit.coefficients;
  if (r > 0) {
    const Matrix lower = cholesky(sub);
    Vector z(r);
    for (Index i = 0; i < r; ++i) z(i) = rng.normal();
    const Vector shift = draw.sigma * (lower * z);
    for (Index a = 0; a < r; ++a) draw.coefficients(identified[a]) += shift(a);
  }
  return draw;
}

}  // namespace tpsim::stat
