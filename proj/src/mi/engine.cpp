#include "tpsim/mi/engine.hpp"

#include "tpsim/stat/ols.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace tpsim::mi {

using model::CompiledDesign;
using model::ModelFrame;
using trial::Arm;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ByGroup {
  std::string label;
  std::uint64_t stream_tag = 0;
  std::vector<Index> rows;
};

std::vector<ByGroup> make_groups(const std::vector<trial::SubjectRecord>& subjects,
                                 bool by_final_pattern) {
  std::vector<ByGroup> groups;
  for (Arm arm : {Arm::Control, Arm::Active}) {
    const std::uint64_t arm_tag = arm == Arm::Control ? 0 : 1;
    if (!by_final_pattern) {
      ByGroup group;
      group.label = std::string("arm=") + trial::to_string(arm);
      group.stream_tag = arm_tag * 8 + 7;
      for (Index i = 0; i < static_cast<Index>(subjects.size()); ++i) {
        if (subjects[static_cast<std::size_t>(i)].arm == arm) group.rows.push_back(i);
      }
      groups.push_back(std::move(group));
      continue;
    }
    // One cell per final pattern present, keyed by discontinuation time.
    std::map<std::string, ByGroup> cells;
    for (Index i = 0; i < static_cast<Index>(subjects.size()); ++i) {
      const auto& subject = subjects[static_cast<std::size_t>(i)];
      if (subject.arm != arm) continue;
      const std::string pattern = model::pattern_prefix(subject.disc_time, 3);
      ByGroup& cell = cells[pattern];
      if (cell.rows.empty()) {
        cell.label = std::string("arm=") + trial::to_string(arm) + " pattern=" + pattern;
        cell.stream_tag = arm_tag * 8 + static_cast<std::uint64_t>(subject.disc_time);
      }
      cell.rows.push_back(i);
    }
    for (auto& [pattern, cell] : cells) groups.push_back(std::move(cell));
  }
  return groups;
}

Vector centering_part(const ModelFrame& frame, const CompiledDesign& design,
                      const std::vector<Index>& rows, const Vector& coeff_draw) {
  Vector part = Vector::Zero(static_cast<Index>(rows.size()));
  for (Index c = 0; c < design.cols(); ++c) {
    const auto& column = design.columns[static_cast<std::size_t>(c)];
    if (column.kind == CompiledDesign::Column::Kind::Intercept) {
      part.array() += coeff_draw(c);
    } else if (column.kind == CompiledDesign::Column::Kind::ClassLevel) {
      const auto& factor = frame.factors.at(column.variable);
      for (Index r = 0; r < static_cast<Index>(rows.size()); ++r) {
        const Index row = rows[static_cast<std::size_t>(r)];
        if (factor.codes[static_cast<std::size_t>(row)] == column.level) {
          part(r) += coeff_draw(c);
        }
      }
    }
  }
  return part;
}

}  // namespace

bool CompletedData::all_ok() const {
  return std::all_of(status.begin(), status.end(),
                     [](const CopyStatus& s) { return s.ok; });
}

std::string CompletedData::first_failure() const {
  for (const CopyStatus& s : status) {
    if (!s.ok) {
      return s.group + " at timepoint " + std::to_string(s.timepoint) + ": " + s.reason;
    }
  }
  return {};
}

model::ModelFrame make_frame(const std::vector<trial::SubjectRecord>& subjects) {
  ModelFrame frame;
  frame.rows = static_cast<Index>(subjects.size());
  for (int j = 0; j < 4; ++j) {
    Vector column(frame.rows);
    for (Index i = 0; i < frame.rows; ++i) {
      const auto& subject = subjects[static_cast<std::size_t>(i)];
      column(i) = subject.has_observed(j) ? subject.observed(j) : kNaN;
    }
    frame.numeric["Y" + std::to_string(j)] = std::move(column);
  }
  for (int j = 1; j <= 3; ++j) {
    ModelFrame::Factor d_factor;
    d_factor.n_levels = 2;
    d_factor.level_labels = {"O", "X"};
    ModelFrame::Factor p_factor;
    p_factor.n_levels = j + 1;
    for (int level = 0; level <= j; ++level) {
      p_factor.level_labels.push_back(
          model::pattern_prefix(level == 0 ? 0 : j - level + 1, j));
    }
    d_factor.codes.reserve(static_cast<std::size_t>(frame.rows));
    p_factor.codes.reserve(static_cast<std::size_t>(frame.rows));
    for (const auto& subject : subjects) {
      const model::DerivedVars vars = model::derive_vars(subject.disc_time);
      d_factor.codes.push_back(vars.d[static_cast<std::size_t>(j - 1)]);
      p_factor.codes.push_back(vars.p_level[static_cast<std::size_t>(j - 1)]);
    }
    frame.factors["D" + std::to_string(j)] = std::move(d_factor);
    frame.factors["P" + std::to_string(j)] = std::move(p_factor);
  }
  return frame;
}

Vector update_residuals(const ModelFrame& frame, const CompiledDesign& design,
                        const Vector& y_current, const std::vector<Index>& rows,
                        const Vector& coeff_draw) {
  const Vector part = centering_part(frame, design, rows, coeff_draw);
  Vector residuals(static_cast<Index>(rows.size()));
  for (Index r = 0; r < residuals.size(); ++r) {
    residuals(r) = y_current(rows[static_cast<std::size_t>(r)]) - part(r);
  }
  return residuals;
}

CompletedData impute(const trial::TrialDataset& dataset, const model::ModelSpec& spec,
                     const ImputationConfig& cfg) {
  if (cfg.m < 1) throw Error("impute: m must be at least 1");
  const auto& subjects = dataset.subjects;
  const Index n = static_cast<Index>(subjects.size());

  Matrix observed(n, 4);
  for (Index i = 0; i < n; ++i) {
    for (int j = 0; j < 4; ++j) {
      const auto& subject = subjects[static_cast<std::size_t>(i)];
      observed(i, j) = subject.has_observed(j) ? subject.observed(j) : kNaN;
    }
  }

  ModelFrame frame = make_frame(subjects);
  const std::vector<ByGroup> groups = make_groups(subjects, spec.by_final_pattern);

  const stat::RngStream engine_root =
      stat::RngStream(cfg.seed, cfg.stream_tag)
          .derive(static_cast<std::uint64_t>(dataset.scenario.id))
          .derive(static_cast<std::uint64_t>(dataset.replicate_id))
          .derive(static_cast<std::uint64_t>(spec.name) + 101);

  CompletedData out;
  out.model = spec.name;
  out.copies.reserve(static_cast<std::size_t>(cfg.m));
  out.status.resize(static_cast<std::size_t>(cfg.m));

  for (int copy = 0; copy < cfg.m; ++copy) {
    Matrix y = observed;
    CopyStatus& status = out.status[static_cast<std::size_t>(copy)];
    const stat::RngStream copy_root =
        engine_root.derive(static_cast<std::uint64_t>(copy));

    for (const ByGroup& group : groups) {
      const stat::RngStream group_root = copy_root.derive(group.stream_tag);

      // Residual models: per-group posterior draw of the baseline mean.
      if (spec.residual_mode) {
        stat::RngStream rng = group_root.derive(0);
        Vector y0(static_cast<Index>(group.rows.size()));
        for (Index r = 0; r < y0.size(); ++r) {
          y0(r) = y(group.rows[static_cast<std::size_t>(r)], 0);
        }
        try {
          const stat::LsFit fit = stat::ols_fit(Matrix::Ones(y0.size(), 1), y0);
          const stat::RegressionDraw draw = stat::bayes_regression_draw(fit, rng);
          Vector r0 = Vector::Constant(n, kNaN);
          for (Index row : group.rows) r0(row) = y(row, 0) - draw.coefficients(0);
          frame.numeric["R0"] = std::move(r0);
        } catch (const Error& error) {
          status = {false, 0, group.label, error.what()};
          break;
        }
      }

      for (int j = 1; j <= 3 && status.ok; ++j) {
        std::vector<Index> fit_rows, missing_rows;
        for (Index row : group.rows) {
          if (std::isnan(observed(row, j))) {
            missing_rows.push_back(row);
          } else {
            fit_rows.push_back(row);
          }
        }

        StepDiagnostics diag;
        diag.group = group.label;
        diag.timepoint = j;
        diag.rows_used = static_cast<Index>(fit_rows.size());

        // Value models fit a step only when it has something to impute.
        // Residual models always fit: the drawn parameters center R_j for
        // the steps that follow.
        if (missing_rows.empty() && !spec.residual_mode) {
          diag.skipped = true;
          if (copy == 0) out.diagnostics.push_back(std::move(diag));
          continue;
        }
        if (fit_rows.empty()) {
          status = {false, j, group.label,
                    "no complete rows to fit (insufficient off-treatment data)"};
          if (copy == 0) out.diagnostics.push_back(std::move(diag));
          break;
        }

        stat::RngStream rng = group_root.derive(static_cast<std::uint64_t>(j));
        try {
          // Current copy values (observed plus earlier imputations).
          for (int k = 0; k <= j; ++k) {
            Vector column(n);
            for (Index row = 0; row < n; ++row) column(row) = y(row, k);
            frame.numeric["Y" + std::to_string(k)] = std::move(column);
          }

          const CompiledDesign design =
              model::compile_design(spec.formulas[static_cast<std::size_t>(j - 1)],
                                    frame, fit_rows);
          diag.dropped_levels = design.dropped_levels;
          const Matrix x = design.matrix(frame, fit_rows);
          Vector response(static_cast<Index>(fit_rows.size()));
          for (Index r = 0; r < response.size(); ++r) {
            response(r) = y(fit_rows[static_cast<std::size_t>(r)], j);
          }

          const model::EstimabilityReport report =
              model::estimability_check(x, cfg.min_resid_df, design.labels());
          diag.rank = report.rank;
          // Rank-deficient fits alias the dependent columns to zero and
          // proceed; the step fails only when the identified part leaves
          // too few residual degrees of freedom.
          diag.resid_df = report.n_rows - report.rank;
          if (copy == 0) out.diagnostics.push_back(diag);
          if (report.n_rows - report.rank < cfg.min_resid_df) {
            status = {false, j, group.label, report.to_string()};
            break;
          }

          const stat::LsFit fit = stat::ols_fit(x, response);
          if (fit.residual_variance <= cfg.sigma_floor) {
            throw DegenerateVariance("residual variance below sigma floor");
          }
          const stat::RegressionDraw draw = stat::bayes_regression_draw(fit, rng);

          Eigen::RowVectorXd design_row(design.cols());
          for (Index row : missing_rows) {
            design.fill_row(frame, row, design_row);
            y(row, j) = design_row.dot(draw.coefficients) + draw.sigma * rng.normal();
          }

          if (spec.residual_mode) {
            Vector y_j(n);
            for (Index row = 0; row < n; ++row) y_j(row) = y(row, j);
            const Vector residuals =
                update_residuals(frame, design, y_j, group.rows, draw.coefficients);
            Vector& r_col = frame.numeric["R" + std::to_string(j)];
            if (r_col.size() != n) r_col = Vector::Constant(n, kNaN);
            for (Index r = 0; r < static_cast<Index>(group.rows.size()); ++r) {
              r_col(group.rows[static_cast<std::size_t>(r)]) = residuals(r);
            }
          }
        } catch (const Error& error) {
          status = {false, j, group.label, error.what()};
          break;
        }
      }
      if (!status.ok) break;
    }
    out.copies.push_back(std::move(y));
  }
  return out;
}

void write_completed_csv(std::ostream& out, const trial::TrialDataset& dataset,
                         const CompletedData& completed) {
  out << "copy,id,arm,y0,y1,y2,y3,disc_time,withdrawn,replicate,scenario_id\n";
  for (std::size_t copy = 0; copy < completed.copies.size(); ++copy) {
    const Matrix& y = completed.copies[copy];
    for (Index i = 0; i < y.rows(); ++i) {
      const auto& subject = dataset.subjects[static_cast<std::size_t>(i)];
      out << copy << ',' << subject.id << ',' << trial::to_string(subject.arm);
      for (int j = 0; j < 4; ++j) {
        out << ',';
        if (!std::isnan(y(i, j))) out << y(i, j);
      }
      out << ',' << subject.disc_time << ',' << (subject.withdrawn ? 1 : 0) << ','
          << dataset.replicate_id << ',' << dataset.scenario.id << '\n';
    }
  }
}

}  // namespace tpsim::mi
