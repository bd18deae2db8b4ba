#include "tpsim/stat/linalg.hpp"

#include <cmath>

namespace tpsim::stat {

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

Matrix cholesky(const Matrix& m) {
  if (!is_symmetric(m)) {
    throw NotPositiveDefinite("cholesky: matrix is not symmetric");
  }
  const Index n = m.rows();
  const double pivot_floor = 1e-12 * m.diagonal().maxCoeff();
  Matrix lower = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double pivot = m(j, j) - lower.row(j).head(j).squaredNorm();
    if (pivot <= pivot_floor) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(pivot) +
                                " at column " + std::to_string(j));
    }
    lower(j, j) = std::sqrt(pivot);
    for (Index i = j + 1; i < n; ++i) {
      lower(i, j) =
          (m(i, j) - lower.row(i).head(j).dot(lower.row(j).head(j))) / lower(j, j);
    }
  }
  return lower;
}

Vector mvn_sample(const Vector& mean, const Matrix& cov, RngStream& rng) {
  const Matrix lower = cholesky(cov);
  Vector z(mean.size());
  for (Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean + lower * z;
}

}  // namespace tpsim::stat
