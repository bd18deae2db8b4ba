#pragma once

#include "tpsim/common.hpp"

namespace tpsim::analyze {

// One estimand component in mL: point estimate, sampling variance and the
// degrees of freedom of its t reference.
struct Component {
  double point = 0.0;
  double variance = 0.0;
  double df = 0.0;
};

struct EstimateTriple {
  Component mean_change_control;
  Component mean_change_active;
  Component effect;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// point +/- t_{df, (1+level)/2} * sqrt(variance).
Interval t_interval(const Component& component, double level = 0.95);

}  // namespace tpsim::analyze
