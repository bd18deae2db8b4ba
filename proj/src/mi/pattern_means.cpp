#include "tpsim/mi/pattern_means.hpp"

#include "tpsim/mi/engine.hpp"

namespace tpsim::mi {

namespace {

const std::array<int, 4> kPatternDiscTimes{0, 3, 2, 1};  // OOO, OOX, OXX, XXX

model::ModelFrame pattern_frame() {
  model::ModelFrame frame;
  frame.rows = 4;
  for (int j = 1; j <= 3; ++j) {
    model::ModelFrame::Factor d_factor;
    d_factor.n_levels = 2;
    d_factor.level_labels = {"O", "X"};
    model::ModelFrame::Factor p_factor;
    p_factor.n_levels = j + 1;
    for (int level = 0; level <= j; ++level) {
      p_factor.level_labels.push_back(
          model::pattern_prefix(level == 0 ? 0 : j - level + 1, j));
    }
    for (int disc_time : kPatternDiscTimes) {
      const model::DerivedVars vars = model::derive_vars(disc_time);
      d_factor.codes.push_back(vars.d[static_cast<std::size_t>(j - 1)]);
      p_factor.codes.push_back(vars.p_level[static_cast<std::size_t>(j - 1)]);
    }
    frame.factors["D" + std::to_string(j)] = std::move(d_factor);
    frame.factors["P" + std::to_string(j)] = std::move(p_factor);
  }
  return frame;
}

std::vector<Index> all_rows() { return {0, 1, 2, 3}; }

}  // namespace

std::vector<std::string> pattern_design_labels(const model::ModelSpec& spec,
                                               int timepoint) {
  if (timepoint < 1 || timepoint > 3) {
    throw Error("pattern_design_labels: timepoint must be 1..3");
  }
  model::ModelFrame frame = pattern_frame();
  for (int k = 0; k < timepoint; ++k) {
    frame.numeric["Y" + std::to_string(k)] = Vector::Zero(4);
    frame.numeric["R" + std::to_string(k)] = Vector::Zero(4);
  }
  const std::vector<Index> rows = all_rows();
  return model::compile_design(spec.formulas[static_cast<std::size_t>(timepoint - 1)],
                               frame, rows)
      .labels();
}

PatternMeans predict_pattern_means(const model::ModelSpec& spec,
                                   const std::array<Vector, 3>& step_coeffs,
                                   double baseline_mean) {
  model::ModelFrame frame = pattern_frame();
  const std::vector<Index> rows = all_rows();
  frame.numeric["Y0"] = Vector::Constant(4, baseline_mean);
  if (spec.residual_mode) {
    frame.numeric["R0"] = Vector::Zero(4);  // E[R0] = 0
  }

  Matrix composed(4, 3);
  for (int j = 1; j <= 3; ++j) {
    const model::CompiledDesign design = model::compile_design(
        spec.formulas[static_cast<std::size_t>(j - 1)], frame, rows);
    const Vector& coeffs = step_coeffs[static_cast<std::size_t>(j - 1)];
    if (coeffs.size() != design.cols()) {
      throw Error("predict_pattern_means: step " + std::to_string(j) + " expects " +
                  std::to_string(design.cols()) + " coefficients, got " +
                  std::to_string(coeffs.size()));
    }
    const Matrix x = design.matrix(frame, rows);
    const Vector mu = x * coeffs;
    composed.col(j - 1) = mu;
    frame.numeric["Y" + std::to_string(j)] = mu;
    if (spec.residual_mode) {
      frame.numeric["R" + std::to_string(j)] =
          update_residuals(frame, design, mu, rows, coeffs);
    }
  }

  PatternMeans out;
  for (std::size_t row = 0; row < 4; ++row) {
    const std::string pattern = model::pattern_prefix(kPatternDiscTimes[row], 3);
    out.means[pattern] = {composed(static_cast<Index>(row), 0),
                          composed(static_cast<Index>(row), 1),
                          composed(static_cast<Index>(row), 2)};
  }
  return out;
}

}  // namespace tpsim::mi
