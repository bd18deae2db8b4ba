#include "tpsim/harness/theory.hpp"

#include "tpsim/common.hpp"

namespace tpsim::harness {

double theory_bias(double n1, double n2, double mu1, double mu2) {
  if (n1 <= 0.0 || n2 <= 0.0) {
    throw Error("theory_bias: group sizes must be positive");
  }
  return n1 * n2 * (mu1 - mu2) / ((n1 + n2) * (n1 + 2.0 * n2));
}

double theory_var_inflation(double n1, double n2, double n3) {
  if (n2 == 0.0) {
    throw Error("theory_var_inflation: division by zero (n2 = 0)");
  }
  const double n = n1 + n2 + n3;
  if (n <= 0.0) {
    throw Error("theory_var_inflation: total size must be positive");
  }
  return (n3 / n) * (1.0 + n3 / n2);
}

double theory_effect_inflation(double control_inflation, double active_inflation) {
  return 0.5 * (control_inflation + active_inflation);
}

}  // namespace tpsim::harness
