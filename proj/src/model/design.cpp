#include "tpsim/model/design.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace tpsim::model {

DerivedVars derive_vars(int disc_time) {
  if (disc_time < 0 || disc_time > 3) {
    throw Error("derive_vars: disc_time must be 0 (completer) or 1..3");
  }
  DerivedVars vars;
  for (int j = 1; j <= 3; ++j) {
    const bool off = disc_time != 0 && disc_time <= j;
    vars.d[static_cast<std::size_t>(j - 1)] = off ? 1 : 0;
    vars.p_level[static_cast<std::size_t>(j - 1)] = off ? j - disc_time + 1 : 0;
  }
  vars.final_pattern = pattern_prefix(disc_time, 3);
  return vars;
}

std::string pattern_prefix(int disc_time, int timepoint) {
  std::string pattern;
  for (int j = 1; j <= timepoint; ++j) {
    pattern += (disc_time != 0 && disc_time <= j) ? 'X' : 'O';
  }
  return pattern;
}

namespace {

const ModelFrame::Factor& find_factor(const ModelFrame& frame, const std::string& name) {
  auto it = frame.factors.find(name);
  if (it == frame.factors.end()) {
    throw UnknownVariable("design: unknown class variable '" + name + "'");
  }
  return it->second;
}

const Vector& find_numeric(const ModelFrame& frame, const std::string& name) {
  auto it = frame.numeric.find(name);
  if (it == frame.numeric.end()) {
    throw UnknownVariable("design: unknown variable '" + name + "'");
  }
  return it->second;
}

std::string level_label(const ModelFrame::Factor& factor, const std::string& name,
                        int level) {
  if (level < static_cast<int>(factor.level_labels.size())) {
    return name + "[" + factor.level_labels[static_cast<std::size_t>(level)] + "]";
  }
  return name + "[" + std::to_string(level) + "]";
}

}  // namespace

std::vector<std::string> CompiledDesign::labels() const {
  std::vector<std::string> out;
  out.reserve(columns.size());
  for (const Column& column : columns) out.push_back(column.label);
  return out;
}

Matrix CompiledDesign::matrix(const ModelFrame& frame, const std::vector<Index>& rows) const {
  Matrix design(static_cast<Index>(rows.size()), cols());
  for (Index i = 0; i < static_cast<Index>(rows.size()); ++i) {
    fill_row(frame, rows[static_cast<std::size_t>(i)], design.row(i));
  }
  return design;
}

void CompiledDesign::fill_row(const ModelFrame& frame, Index row, RowRef out) const {
  for (Index c = 0; c < cols(); ++c) {
    const Column& column = columns[static_cast<std::size_t>(c)];
    switch (column.kind) {
      case Column::Kind::Intercept:
        out(c) = 1.0;
        break;
      case Column::Kind::Continuous:
        out(c) = find_numeric(frame, column.variable)(row);
        break;
      case Column::Kind::ClassLevel:
        out(c) = find_factor(frame, column.variable).codes[static_cast<std::size_t>(row)] ==
                         column.level
                     ? 1.0
                     : 0.0;
        break;
      case Column::Kind::InteractionLevel: {
        const bool match =
            find_factor(frame, column.variable).codes[static_cast<std::size_t>(row)] ==
            column.level;
        out(c) = match ? find_numeric(frame, column.partner)(row) : 0.0;
        break;
      }
    }
  }
}

CompiledDesign compile_design(const Formula& formula, const ModelFrame& frame,
                              const std::vector<Index>& fit_rows) {
  CompiledDesign design;
  design.columns.push_back({CompiledDesign::Column::Kind::Intercept, "", 0, "", "Intercept"});

  auto levels_present = [&](const ModelFrame::Factor& factor) {
    std::set<int> present;
    for (Index row : fit_rows) present.insert(factor.codes[static_cast<std::size_t>(row)]);
    return present;
  };

  for (const Term& term : formula.terms) {
    switch (term.kind) {
      case Term::Kind::Continuous: {
        find_numeric(frame, term.name);
        design.columns.push_back(
            {CompiledDesign::Column::Kind::Continuous, term.name, 0, "", term.name});
        break;
      }
      case Term::Kind::Class: {
        const ModelFrame::Factor& factor = find_factor(frame, term.name);
        const std::set<int> present = levels_present(factor);
        for (int level = 1; level < factor.n_levels; ++level) {
          const std::string label = level_label(factor, term.name, level);
          if (present.count(level) == 0) {
            design.dropped_levels.push_back(label);
            continue;
          }
          design.columns.push_back(
              {CompiledDesign::Column::Kind::ClassLevel, term.name, level, "", label});
        }
        break;
      }
      case Term::Kind::Interaction: {
        const ModelFrame::Factor& factor = find_factor(frame, term.name);
        find_numeric(frame, term.partner);
        const std::set<int> present = levels_present(factor);
        for (int level = 1; level < factor.n_levels; ++level) {
          const std::string label =
              level_label(factor, term.name, level) + "*" + term.partner;
          if (present.count(level) == 0) {
            design.dropped_levels.push_back(label);
            continue;
          }
          design.columns.push_back({CompiledDesign::Column::Kind::InteractionLevel,
                                    term.name, level, term.partner, label});
        }
        break;
      }
    }
  }
  return design;
}

std::pair<Matrix, std::vector<std::string>> build_design(
    const Formula& formula, const ModelFrame& frame, const std::vector<Index>& rows) {
  if (rows.empty()) {
    throw EmptyDesign("build_design: no rows for '" + render(formula) + "'");
  }
  const CompiledDesign design = compile_design(formula, frame, rows);
  return {design.matrix(frame, rows), design.labels()};
}

std::string EstimabilityReport::to_string() const {
  std::ostringstream out;
  out << (ok ? "ok" : "failure") << " (rows=" << n_rows << ", cols=" << n_cols
      << ", rank=" << rank << ", resid_df=" << resid_df << ")";
  for (const std::string& problem : problems) out << "; " << problem;
  return out.str();
}

EstimabilityReport estimability_check(const Matrix& design, Index min_resid_df,
                                      const std::vector<std::string>& labels) {
  EstimabilityReport report;
  report.n_rows = design.rows();
  report.n_cols = design.cols();
  if (design.rows() == 0 || design.cols() == 0) {
    report.problems.push_back("empty design");
    return report;
  }

  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  qr.setThreshold(1e-10);
  report.rank = qr.rank();
  report.resid_df = report.n_rows - report.n_cols;
  auto label_of = [&](Index column) {
    return column < static_cast<Index>(labels.size())
               ? labels[static_cast<std::size_t>(column)]
               : "column " + std::to_string(column);
  };
  if (report.rank < report.n_cols) {
    const auto& perm = qr.colsPermutation().indices();
    std::ostringstream msg;
    msg << "rank deficient; dependent:";
    for (Index k = report.rank; k < report.n_cols; ++k) {
      msg << ' ' << label_of(perm(k));
    }
    report.problems.push_back(msg.str());
  }
  if (report.resid_df < min_resid_df) {
    report.problems.push_back("insufficient data: " + std::to_string(report.n_rows) +
                              " rows for " + std::to_string(report.n_cols) +
                              " columns (needs resid df >= " +
                              std::to_string(min_resid_df) + ")");
  }
  report.ok = report.problems.empty();
  return report;
}

}  // namespace tpsim::model
