#pragma once

#include "tpsim/analyze/estimates.hpp"
#include "tpsim/trial/scenario.hpp"

#include <vector>

namespace tpsim::analyze {

/// ANCOVA of change from baseline at `timepoint`: regression on intercept,
/// treatment indicator and baseline, with marginal (LS) means evaluated at
/// the pooled baseline mean. Requires complete Y0 and Y_timepoint columns;
/// outcomes in litres, results in mL.
EstimateTriple ancova(const Matrix& outcomes, const std::vector<trial::Arm>& arm,
                      int timepoint);

}  // namespace tpsim::analyze
