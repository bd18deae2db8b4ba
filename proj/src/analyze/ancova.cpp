#include "tpsim/analyze/ancova.hpp"

#include "tpsim/stat/ols.hpp"
#include "tpsim/stat/special.hpp"

#include <cmath>

namespace tpsim::analyze {

Interval t_interval(const Component& component, double level) {
  const double q = stat::student_t_quantile(0.5 * (1.0 + level), component.df);
  const double halfwidth = q * std::sqrt(std::max(0.0, component.variance));
  return {component.point - halfwidth, component.point + halfwidth};
}

EstimateTriple ancova(const Matrix& outcomes, const std::vector<trial::Arm>& arm,
                      int timepoint) {
  if (timepoint < 1 || timepoint >= outcomes.cols()) {
    throw Error("ancova: timepoint out of range");
  }
  const Index n = outcomes.rows();
  if (static_cast<Index>(arm.size()) != n) {
    throw Error("ancova: arm vector must match outcome rows");
  }
  Matrix design(n, 3);
  Vector change(n);
  for (Index i = 0; i < n; ++i) {
    const double y0 = outcomes(i, 0);
    const double yj = outcomes(i, timepoint);
    if (std::isnan(y0) || std::isnan(yj)) {
      throw Error("ancova: missing outcome at row " + std::to_string(i));
    }
    design(i, 0) = 1.0;
    design(i, 1) = arm[static_cast<std::size_t>(i)] == trial::Arm::Active ? 1.0 : 0.0;
    design(i, 2) = y0;
    change(i) = yj - y0;
  }
  const double baseline_mean = design.col(2).mean();

  const stat::LsFit fit = stat::ols_fit(design, change);
  const Matrix cov = fit.residual_variance * fit.xtx_inverse;
  const double df = static_cast<double>(fit.residual_df());

  auto component = [&](const Vector& contrast) {
    Component out;
    out.point = 1000.0 * contrast.dot(fit.coefficients);
    out.variance = 1e6 * contrast.dot(cov * contrast);
    out.df = df;
    return out;
  };

  Vector control(3), active(3), effect(3);
  control << 1.0, 0.0, baseline_mean;
  active << 1.0, 1.0, baseline_mean;
  effect << 0.0, 1.0, 0.0;

  EstimateTriple triple;
  triple.mean_change_control = component(control);
  triple.mean_change_active = component(active);
  triple.effect = component(effect);
  return triple;
}

}  // namespace tpsim::analyze
