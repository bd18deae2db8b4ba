#pragma once

namespace tpsim::stat {

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Standard normal quantile (Wichura's AS241 rational approximation).
double normal_quantile(double p);

double student_t_cdf(double t, double df);

/// Student-t quantile; falls back to the normal quantile for very large df.
double student_t_quantile(double p, double df);

}  // namespace tpsim::stat
