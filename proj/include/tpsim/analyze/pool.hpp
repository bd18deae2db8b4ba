#pragma once

#include "tpsim/analyze/estimates.hpp"

#include <utility>
#include <vector>

namespace tpsim::analyze {

// Rubin-combined estimate for one estimand component (mL / mL^2).
struct PooledEstimate {
  double point = 0.0;
  double within_var = 0.0;
  double between_var = 0.0;
  double total_var = 0.0;  // W + (1 + 1/m) B
  double df = 0.0;         // Barnard-Rubin small-sample df
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Rubin's rules over per-copy (point, variance) pairs with the
/// Barnard-Rubin degrees of freedom; 95% CI from the t reference.
/// Throws TooFewCopies when fewer than two estimates are supplied.
PooledEstimate rubin_pool(const std::vector<std::pair<double, double>>& estimates,
                          double complete_data_df);

double ci_halfwidth(const PooledEstimate& pooled);

struct PooledTriple {
  PooledEstimate mean_change_control;
  PooledEstimate mean_change_active;
  PooledEstimate effect;
};

/// Pools each component of the per-copy ANCOVA triples.
PooledTriple pool_triples(const std::vector<EstimateTriple>& triples,
                          double complete_data_df);

}  // namespace tpsim::analyze
