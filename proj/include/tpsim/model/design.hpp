#pragma once

#include "tpsim/common.hpp"
#include "tpsim/model/formula.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace tpsim::model {

// D/P covariates derived from the discontinuation time. P_j has j+1
// levels; level code 0 is the all-on-treatment reference and level k >= 1
// means the subject went off treatment at timepoint j - k + 1.
struct DerivedVars {
  std::array<int, 3> d{};        // D1..D3
  std::array<int, 3> p_level{};  // P1..P3 level codes
  std::string final_pattern;     // e.g. "OOO", "OXX"
};

DerivedVars derive_vars(int disc_time);

/// Pattern prefix up to `timepoint` for a given discontinuation time,
/// e.g. (2, 3) -> "OXX".
std::string pattern_prefix(int disc_time, int timepoint);

// Column store handed to the design builder: continuous variables by
// name (NaN marks missing) and class variables as integer level codes.
struct ModelFrame {
  struct Factor {
    std::vector<int> codes;
    int n_levels = 0;
    std::vector<std::string> level_labels;  // indexed by code
  };

  Index rows = 0;
  std::map<std::string, Vector> numeric;
  std::map<std::string, Factor> factors;
};

// Design compiled against a set of fit rows. Class levels absent from the
// fit rows are dropped (recorded in `dropped_levels`); rows evaluated
// later at a dropped level fall back to the reference coding.
struct CompiledDesign {
  struct Column {
    enum class Kind { Intercept, Continuous, ClassLevel, InteractionLevel };
    Kind kind = Kind::Intercept;
    std::string variable;
    int level = 0;        // class/interaction columns
    std::string partner;  // interaction columns: the continuous variable
    std::string label;
  };

  std::vector<Column> columns;
  std::vector<std::string> dropped_levels;

  std::vector<std::string> labels() const;
  Index cols() const { return static_cast<Index>(columns.size()); }

  using RowRef = Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

  Matrix matrix(const ModelFrame& frame, const std::vector<Index>& rows) const;
  void fill_row(const ModelFrame& frame, Index row, RowRef out) const;
};

/// Resolves a formula against the frame: intercept first, then one column
/// per term in order, reference-coding class variables against the
/// all-on-treatment level. Throws UnknownVariable for unresolved names.
CompiledDesign compile_design(const Formula& formula, const ModelFrame& frame,
                              const std::vector<Index>& fit_rows);

/// Convenience form returning the matrix and column labels for the given
/// rows. Throws EmptyDesign when `rows` is empty.
std::pair<Matrix, std::vector<std::string>> build_design(
    const Formula& formula, const ModelFrame& frame, const std::vector<Index>& rows);

struct EstimabilityReport {
  bool ok = false;
  Index rank = 0;
  Index n_rows = 0;
  Index n_cols = 0;
  Index resid_df = 0;
  std::vector<std::string> problems;

  std::string to_string() const;
};

/// Full column rank and at least min_resid_df residual degrees of freedom;
/// failures name the deficient columns.
EstimabilityReport estimability_check(const Matrix& design, Index min_resid_df = 1,
                                      const std::vector<std::string>& labels = {});

}  // namespace tpsim::model
