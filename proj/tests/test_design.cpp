#include "tpsim/model/design.hpp"

#include "tpsim/mi/engine.hpp"
#include "tpsim/model/spec.hpp"
#include "tpsim/stat/ols.hpp"
#include "tpsim/stat/rng.hpp"

#include <doctest.h>

using namespace tpsim;
using model::CompiledDesign;
using model::DerivedVars;
using model::Formula;
using model::ModelFrame;
using trial::SubjectRecord;

namespace {

std::vector<SubjectRecord> synthetic_subjects(int n, stat::RngStream rng) {
  std::vector<SubjectRecord> subjects(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& s = subjects[static_cast<std::size_t>(i)];
    s.id = i;
    s.disc_time = i % 4;  // 0,1,2,3 round-robin
    double level = 2.0 + rng.normal();
    for (int j = 0; j < 4; ++j) {
      level += 0.3 * rng.normal() + (s.disc_time != 0 && s.disc_time <= j ? -0.4 : 0.1);
      s.observed(j) = level;
    }
  }
  return subjects;
}

}  // namespace

TEST_CASE("derived variables for the three canonical cases") {
  const DerivedVars completer = model::derive_vars(0);
  CHECK(completer.d == std::array<int, 3>{0, 0, 0});
  CHECK(completer.final_pattern == "OOO");

  const DerivedVars mid = model::derive_vars(2);
  CHECK(mid.d == std::array<int, 3>{0, 1, 1});
  CHECK(mid.final_pattern == "OXX");
  CHECK(mid.p_level == std::array<int, 3>{0, 1, 2});

  const DerivedVars early = model::derive_vars(1);
  CHECK(early.final_pattern == "XXX");
  // P1 distinguishes exactly two states at the first timepoint.
  CHECK(early.p_level[0] == 1);
  CHECK(completer.p_level[0] == 0);
}

TEST_CASE("pattern design at timepoint 2") {
  std::vector<SubjectRecord> subjects(6);
  const int disc[6] = {0, 0, 2, 2, 1, 1};
  for (int i = 0; i < 6; ++i) {
    subjects[static_cast<std::size_t>(i)].id = i;
    subjects[static_cast<std::size_t>(i)].disc_time = disc[i];
    subjects[static_cast<std::size_t>(i)].observed << 1.0 + i, 2.0 + i, 3.0 + i, 4.0 + i;
  }
  const ModelFrame frame = mi::make_frame(subjects);
  const Formula formula = model::parse_formula("Y2 = P2 Y0 Y1");
  const auto [x, labels] = model::build_design(formula, frame, {0, 1, 2, 3, 4, 5});
  REQUIRE(labels.size() == 5);
  CHECK(labels[0] == "Intercept");
  CHECK(labels[1] == "P2[OX]");
  CHECK(labels[2] == "P2[XX]");
  CHECK(labels[3] == "Y0");
  CHECK(labels[4] == "Y1");
  CHECK(x(0, 1) == 0.0);
  CHECK(x(2, 1) == 1.0);  // discontinued at 2 -> OX
  CHECK(x(4, 2) == 1.0);  // discontinued at 1 -> XX
  CHECK(x(3, 3) == 4.0);
}

TEST_CASE("minimal design is intercept plus baseline") {
  std::vector<SubjectRecord> subjects(3);
  for (int i = 0; i < 3; ++i) {
    subjects[static_cast<std::size_t>(i)].observed << 0.5 * i, 0.0, 0.0, 0.0;
  }
  const ModelFrame frame = mi::make_frame(subjects);
  const auto [x, labels] =
      model::build_design(model::parse_formula("Y1 = Y0"), frame, {0, 1, 2});
  CHECK(x.rows() == 3);
  CHECK(x.cols() == 2);
  CHECK(x.col(0).isOnes());
  CHECK(x(2, 1) == 1.0);
}

TEST_CASE("sequential on/off design at timepoint 3 enumerates its columns") {
  stat::RngStream rng(21, 0);
  const auto subjects = synthetic_subjects(40, rng);
  const ModelFrame frame = mi::make_frame(subjects);
  std::vector<Index> rows;
  for (Index i = 0; i < 40; ++i) rows.push_back(i);
  const auto [x, labels] = model::build_design(
      model::builtin_spec(model::ModelName::OIOS).formulas[2], frame, rows);
  const std::vector<std::string> expected{"Intercept", "D3[X]",    "Y0", "Y1",
                                          "D3[X]*Y1",  "Y2",       "D3[X]*Y2"};
  CHECK(labels == expected);
  // Interaction columns are elementwise products.
  for (Index i = 0; i < x.rows(); ++i) {
    CHECK(x(i, 4) == x(i, 1) * x(i, 3));
    CHECK(x(i, 6) == x(i, 1) * x(i, 5));
  }
}

TEST_CASE("class terms contribute levels-minus-one columns") {
  stat::RngStream rng(22, 0);
  const auto subjects = synthetic_subjects(32, rng);
  const ModelFrame frame = mi::make_frame(subjects);
  std::vector<Index> rows;
  for (Index i = 0; i < 32; ++i) rows.push_back(i);
  for (int j = 1; j <= 3; ++j) {
    const Formula formula =
        model::parse_formula("Y" + std::to_string(j) + " = P" + std::to_string(j));
    const auto design = model::compile_design(formula, frame, rows);
    CHECK(design.cols() == 1 + j);  // intercept + j non-reference levels
    CHECK(design.dropped_levels.empty());
  }
}

TEST_CASE("levels absent from the fit rows are dropped with a note") {
  stat::RngStream rng(23, 0);
  auto subjects = synthetic_subjects(24, rng);
  std::vector<Index> rows_without_early;  // drop every disc_time == 1 subject
  for (Index i = 0; i < 24; ++i) {
    if (subjects[static_cast<std::size_t>(i)].disc_time != 1) {
      rows_without_early.push_back(i);
    }
  }
  const ModelFrame frame = mi::make_frame(subjects);
  const auto design = model::compile_design(model::parse_formula("Y2 = P2 Y0 Y1"),
                                            frame, rows_without_early);
  REQUIRE(design.dropped_levels.size() == 1);
  CHECK(design.dropped_levels[0] == "P2[XX]");
  // A row at the dropped level falls back to the reference coding.
  Eigen::RowVectorXd row(design.cols());
  design.fill_row(frame, 1, row);  // subject 1 has disc_time 1
  CHECK(row(1) == 0.0);
}

TEST_CASE("estimability verdicts") {
  Matrix tall = Matrix::Random(10, 3);
  const auto ok = model::estimability_check(tall);
  CHECK(ok.ok);

  Matrix wide = Matrix::Random(2, 3);
  const auto short_report = model::estimability_check(wide);
  CHECK_FALSE(short_report.ok);
  CHECK(short_report.to_string().find("insufficient data") != std::string::npos);

  Matrix collinear(8, 3);
  for (int i = 0; i < 8; ++i) {
    collinear(i, 0) = 1.0;
    collinear(i, 1) = static_cast<double>(i);
    collinear(i, 2) = 2.0 * i;
  }
  const auto rank_report =
      model::estimability_check(collinear, 1, {"Intercept", "Y0", "Y0x2"});
  CHECK_FALSE(rank_report.ok);
  CHECK(rank_report.rank == 2);
  CHECK(rank_report.to_string().find("rank deficient") != std::string::npos);

  const auto empty = model::estimability_check(Matrix(0, 0));
  CHECK_FALSE(empty.ok);
}

TEST_CASE("pattern and residual-pattern designs span the same space") {
  stat::RngStream rng(24, 0);
  const auto subjects = synthetic_subjects(60, rng);
  ModelFrame frame = mi::make_frame(subjects);
  std::vector<Index> rows;
  for (Index i = 0; i < 60; ++i) rows.push_back(i);

  const model::ModelSpec pics = model::builtin_spec(model::ModelName::PICS);
  const model::ModelSpec pics_r = model::builtin_spec(model::ModelName::PICS_R);

  // Fixed centering: R0 from the sample mean, later R's from each fitted
  // step's own intercept structure.
  frame.numeric["R0"] =
      (frame.numeric["Y0"].array() - frame.numeric["Y0"].mean()).matrix();

  for (int j = 1; j <= 3; ++j) {
    const auto [x_v, labels_v] =
        model::build_design(pics.formulas[static_cast<std::size_t>(j - 1)], frame, rows);
    const auto design_r = model::compile_design(
        pics_r.formulas[static_cast<std::size_t>(j - 1)], frame, rows);
    const Matrix x_r = design_r.matrix(frame, rows);
    const Vector y = frame.numeric["Y" + std::to_string(j)];

    const stat::LsFit fit_v = stat::ols_fit(x_v, y);
    const stat::LsFit fit_r = stat::ols_fit(x_r, y);
    const Vector fitted_v = x_v * fit_v.coefficients;
    const Vector fitted_r = x_r * fit_r.coefficients;
    CHECK((fitted_v - fitted_r).cwiseAbs().maxCoeff() < 1e-8);

    frame.numeric["R" + std::to_string(j)] =
        mi::update_residuals(frame, design_r, y, rows, fit_r.coefficients);
  }
}
