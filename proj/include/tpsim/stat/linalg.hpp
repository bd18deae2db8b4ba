#pragma once

#include "tpsim/common.hpp"
#include "tpsim/stat/rng.hpp"

namespace tpsim::stat {

bool is_symmetric(const Matrix& m, double tol = 1e-12);

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
/// Throws NotPositiveDefinite when a pivot falls at or below
/// 1e-12 * max diagonal entry.
Matrix cholesky(const Matrix& m);

/// One draw from MVN(mean, cov), computed as mean + L z with L = cholesky(cov).
Vector mvn_sample(const Vector& mean, const Matrix& cov, RngStream& rng);

}  // namespace tpsim::stat
