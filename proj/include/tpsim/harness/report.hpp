#pragma once

#include "tpsim/harness/metrics.hpp"

#include <string>
#include <vector>

namespace tpsim::harness {

/// Writes metrics.csv plus one SVG heatmap per trajectory present in the
/// rows (treatment-effect bias, halfwidth change and coverage panels, one
/// cell per scenario x model). Returns the written file paths. Throws
/// EmptyReport when rows is empty and IoError on write failures.
std::vector<std::string> report(const std::vector<MetricsRow>& rows,
                                const std::string& out_dir);

}  // namespace tpsim::harness
