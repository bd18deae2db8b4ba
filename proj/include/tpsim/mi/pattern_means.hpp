#pragma once

#include "tpsim/common.hpp"
#include "tpsim/model/design.hpp"
#include "tpsim/model/spec.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace tpsim::mi {

// Expected imputed values per final discontinuation pattern, obtained by
// composing the sequential regressions: each step's prediction is
// evaluated at the previous steps' composed means (and, for residual
// models, the implied residual means).
struct PatternMeans {
  // final pattern ("OOO".."XXX") -> composed means at timepoints 1..3
  std::map<std::string, std::array<double, 3>> means;
};

/// Design column labels for one step of the four-pattern evaluation frame;
/// step_coeffs passed to predict_pattern_means must align with these.
std::vector<std::string> pattern_design_labels(const model::ModelSpec& spec,
                                               int timepoint);

PatternMeans predict_pattern_means(const model::ModelSpec& spec,
                                   const std::array<Vector, 3>& step_coeffs,
                                   double baseline_mean);

}  // namespace tpsim::mi
