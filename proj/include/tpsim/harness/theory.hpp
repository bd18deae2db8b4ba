#pragma once

namespace tpsim::harness {

/// Closed-form bias of the pooled (common-history) estimate of a group
/// mean when the n3 = n2 missing subjects behave like the n2 observed
/// off-treatment ones: n1 n2 (mu1 - mu2) / ((n1 + n2)(n1 + 2 n2)).
/// mu arguments and result in mL.
double theory_bias(double n1, double n2, double mu1, double mu2);

/// Relative variance inflation of a group-mean estimate due to missing
/// off-treatment data: (n3 / n) (1 + n3 / n2) with n = n1 + n2 + n3.
/// Throws on n2 == 0.
double theory_var_inflation(double n1, double n2, double n3);

/// Treatment-effect inflation under independence of the two arms: the
/// average of the per-arm inflations.
double theory_effect_inflation(double control_inflation, double active_inflation);

}  // namespace tpsim::harness
