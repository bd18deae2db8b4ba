#include "tpsim/analyze/pool.hpp"

#include "tpsim/stat/special.hpp"

#include <cmath>

namespace tpsim::analyze {

PooledEstimate rubin_pool(const std::vector<std::pair<double, double>>& estimates,
                          double complete_data_df) {
  const std::size_t m = estimates.size();
  if (m < 2) {
    throw TooFewCopies("rubin_pool: needs at least 2 copies, got " +
                       std::to_string(m));
  }
  if (complete_data_df <= 0.0) {
    throw Error("rubin_pool: complete_data_df must be positive");
  }

  PooledEstimate pooled;
  for (const auto& [point, variance] : estimates) {
    pooled.point += point;
    pooled.within_var += variance;
  }
  const double dm = static_cast<double>(m);
  pooled.point /= dm;
  pooled.within_var /= dm;
  for (const auto& [point, variance] : estimates) {
    const double dev = point - pooled.point;
    pooled.between_var += dev * dev;
  }
  pooled.between_var /= (dm - 1.0);
  pooled.total_var = pooled.within_var + (1.0 + 1.0 / dm) * pooled.between_var;

  const double nu_com = complete_data_df;
  const double nu_obs_base = nu_com * (nu_com + 1.0) / (nu_com + 3.0);
  if (pooled.total_var <= 0.0) {
    // Degenerate: identical copies with zero within variance.
    pooled.df = nu_obs_base;
    pooled.ci_low = pooled.ci_high = pooled.point;
    return pooled;
  }
  const double lambda = (1.0 + 1.0 / dm) * pooled.between_var / pooled.total_var;
  const double nu_obs = nu_obs_base * (1.0 - lambda);
  if (lambda <= 0.0) {
    pooled.df = nu_obs;
  } else {
    const double nu_old = (dm - 1.0) / (lambda * lambda);
    pooled.df = 1.0 / (1.0 / nu_old + 1.0 / nu_obs);
  }

  const double q = stat::student_t_quantile(0.975, pooled.df);
  const double halfwidth = q * std::sqrt(pooled.total_var);
  pooled.ci_low = pooled.point - halfwidth;
  pooled.ci_high = pooled.point + halfwidth;
  return pooled;
}

double ci_halfwidth(const PooledEstimate& pooled) {
  return 0.5 * (pooled.ci_high - pooled.ci_low);
}

PooledTriple pool_triples(const std::vector<EstimateTriple>& triples,
                          double complete_data_df) {
  auto pool_component = [&](auto member) {
    std::vector<std::pair<double, double>> estimates;
    estimates.reserve(triples.size());
    for (const EstimateTriple& triple : triples) {
      const Component& c = triple.*member;
      estimates.emplace_back(c.point, c.variance);
    }
    return rubin_pool(estimates, complete_data_df);
  };
  PooledTriple pooled;
  pooled.mean_change_control = pool_component(&EstimateTriple::mean_change_control);
  pooled.mean_change_active = pool_component(&EstimateTriple::mean_change_active);
  pooled.effect = pool_component(&EstimateTriple::effect);
  return pooled;
}

}  // namespace tpsim::analyze
