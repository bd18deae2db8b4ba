#pragma once

#include "tpsim/common.hpp"

#include <functional>
#include <optional>
#include <string>

namespace tpsim::stat {

struct Bounds {
  Vector lower;
  Vector upper;
};

struct MaximizeOptions {
  int max_iterations = 500;
  // Converged when ||grad|| <= gradient_tol * (1 + |value|).
  double gradient_tol = 1e-6;
};

struct OptimResult {
  Vector argmax;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
  double gradient_norm = 0.0;
  std::string message;
};

using Objective = std::function<double(const Vector&)>;
using Gradient = std::function<Vector(const Vector&)>;

/// Maximizes a smooth objective by BFGS with backtracking line search.
/// Gradients come from central finite differences unless an analytic
/// gradient is supplied. Box bounds, when given, are enforced by
/// projection. A non-finite objective value encountered in the line
/// search aborts with converged=false and a diagnostic message.
OptimResult maximize(const Objective& objective, const Vector& start,
                     const std::optional<Bounds>& bounds = std::nullopt,
                     const MaximizeOptions& options = {},
                     const Gradient& gradient = nullptr);

}  // namespace tpsim::stat
