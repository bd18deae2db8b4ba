#include "tpsim/stat/optimize.hpp"

#include <cmath>
#include <limits>

namespace tpsim::stat {

namespace {

Vector project(Vector x, const std::optional<Bounds>& bounds) {
  if (bounds) {
    x = x.cwiseMax(bounds->lower).cwiseMin(bounds->upper);
  }
  return x;
}

// Gradient components pointing out of the feasible box do not count
// against convergence.
Vector projected(const Vector& grad_phi, const Vector& x,
                 const std::optional<Bounds>& bounds) {
  if (!bounds) return grad_phi;
  Vector pg = grad_phi;
  const double edge = 1e-12;
  for (Index i = 0; i < x.size(); ++i) {
    const bool at_lower = x(i) - bounds->lower(i) <= edge * (1.0 + std::fabs(x(i)));
    const bool at_upper = bounds->upper(i) - x(i) <= edge * (1.0 + std::fabs(x(i)));
    if ((at_lower && pg(i) > 0.0) || (at_upper && pg(i) < 0.0)) pg(i) = 0.0;
  }
  return pg;
}

// Central differences, one-sided at an active bound.
Vector fd_gradient(const Objective& f, const Vector& x, double fx,
                   const std::optional<Bounds>& bounds, int& evals) {
  const Index n = x.size();
  Vector grad(n);
  const double cbrt_eps = std::cbrt(std::numeric_limits<double>::epsilon());
  for (Index i = 0; i < n; ++i) {
    const double h = cbrt_eps * std::max(1.0, std::fabs(x(i)));
    double hi = h, lo = h;
    if (bounds) {
      hi = std::min(hi, bounds->upper(i) - x(i));
      lo = std::min(lo, x(i) - bounds->lower(i));
    }
    Vector xp = x, xm = x;
    if (hi > 0.0 && lo > 0.0) {
      xp(i) += hi;
      xm(i) -= lo;
      grad(i) = (f(xp) - f(xm)) / (hi + lo);
      evals += 2;
    } else if (hi > 0.0) {
      xp(i) += hi;
      grad(i) = (f(xp) - fx) / hi;
      ++evals;
    } else if (lo > 0.0) {
      xm(i) -= lo;
      grad(i) = (fx - f(xm)) / lo;
      ++evals;
    } else {
      grad(i) = 0.0;
    }
  }
  return grad;
}

}  // namespace

OptimResult maximize(const Objective& objective, const Vector& start,
                     const std::optional<Bounds>& bounds,
                     const MaximizeOptions& options, const Gradient& gradient) {
  OptimResult result;
  const Index n = start.size();
  Vector x = project(start, bounds);
  double fx = objective(x);
  ++result.evaluations;
  if (!std::isfinite(fx)) {
    result.argmax = x;
    result.value = fx;
    result.message = "objective not finite at start";
    return result;
  }

  // Gradient of the negated objective (we minimize -f).
  auto grad_phi = [&](const Vector& at, double f_at) -> Vector {
    if (gradient) return -gradient(at);
    return -fd_gradient(objective, at, f_at, bounds, result.evaluations);
  };

  Matrix h_inv = Matrix::Identity(n, n);  // inverse Hessian of the negated objective
  Vector grad = grad_phi(x, fx);
  bool just_reset = false;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    const double gnorm = projected(grad, x, bounds).norm();
    result.gradient_norm = gnorm;
    if (gnorm <= options.gradient_tol * (1.0 + std::fabs(fx))) {
      result.converged = true;
      break;
    }

    Vector direction = -(h_inv * grad);
    if (direction.dot(grad) >= 0.0) {
      // Lost descent in the minimization sense; reset curvature.
      h_inv = Matrix::Identity(n, n);
      direction = -grad;
    }

    // Backtracking Armijo line search on the negated objective.
    double step = 1.0;
    const double slope = grad.dot(direction);
    Vector x_next;
    double f_next = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_next = project(x + step * direction, bounds);
      f_next = objective(x_next);
      ++result.evaluations;
      if (!std::isfinite(f_next)) {
        step *= 0.5;
        continue;
      }
      if (-f_next <= -fx + 1e-4 * step * slope || (x_next - x).norm() == 0.0) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!just_reset) {
        // Retry the iteration along the raw gradient before giving up;
        // stale curvature often blocks the last few digits.
        h_inv = Matrix::Identity(n, n);
        just_reset = true;
        continue;
      }
      result.message = std::isfinite(f_next)
                           ? "line search failed to make progress"
                           : "objective not finite during line search";
      break;
    }
    just_reset = false;

    const Vector grad_next = grad_phi(x_next, f_next);
    const Vector s = x_next - x;
    const Vector y = grad_next - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Matrix eye = Matrix::Identity(n, n);
      const Matrix left = eye - rho * s * y.transpose();
      h_inv = left * h_inv * left.transpose() + rho * s * s.transpose();
    }

    if (s.norm() <= 1e-14 * (1.0 + x.norm())) {
      // Step collapsed; report current gradient status.
      x = x_next;
      fx = f_next;
      grad = grad_next;
      result.gradient_norm = projected(grad, x, bounds).norm();
      result.converged =
          result.gradient_norm <= options.gradient_tol * (1.0 + std::fabs(fx));
      if (!result.converged) result.message = "step size underflow";
      break;
    }

    x = x_next;
    fx = f_next;
    grad = grad_next;
  }

  if (!result.converged && result.message.empty()) {
    result.message = "maximum iterations reached";
  }
  result.argmax = x;
  result.value = fx;
  return result;
}

}  // namespace tpsim::stat
