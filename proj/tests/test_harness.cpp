#include "tpsim/harness/metrics.hpp"
#include "tpsim/harness/report.hpp"
#include "tpsim/harness/runner.hpp"
#include "tpsim/harness/theory.hpp"

#include "tpsim/analyze/ancova.hpp"
#include "tpsim/stat/rng.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tpsim;
using harness::AnalysisModel;
using harness::MetricsRow;

TEST_CASE("coverage counting") {
  using analyze::Interval;
  const std::vector<Interval> all{{0.0, 1.0}, {-1.0, 2.0}, {0.4, 0.6}};
  CHECK(harness::coverage(all, 0.5).fraction == 1.0);

  const std::vector<Interval> half{{0.0, 1.0}, {2.0, 3.0}};
  const auto result = harness::coverage(half, 0.5);
  CHECK(result.fraction == 0.5);
  CHECK(result.mc_se == doctest::Approx(std::sqrt(0.25 / 2.0)));
}

TEST_CASE("t-intervals achieve nominal coverage on normal data") {
  stat::RngStream rng(80, 0);
  const int sims = 10000;
  const int n = 20;  // per arm
  const double true_effect = 100.0;  // mL
  std::vector<analyze::Interval> intervals;
  intervals.reserve(sims);
  std::vector<trial::Arm> arm;
  for (int i = 0; i < 2 * n; ++i) {
    arm.push_back(i < n ? trial::Arm::Control : trial::Arm::Active);
  }
  for (int s = 0; s < sims; ++s) {
    Matrix y(2 * n, 4);
    for (int i = 0; i < 2 * n; ++i) {
      const double y0 = 2.0 + 0.3 * rng.normal();
      const double treat = i >= n ? 0.1 : 0.0;
      const double change = treat + 0.5 * (y0 - 2.0) + 0.2 * rng.normal();
      y(i, 0) = y0;
      y(i, 1) = y(i, 2) = y(i, 3) = y0 + change;
    }
    const analyze::EstimateTriple triple = analyze::ancova(y, arm, 3);
    intervals.push_back(analyze::t_interval(triple.effect));
  }
  const auto result = harness::coverage(intervals, true_effect);
  CHECK(std::fabs(result.fraction - 0.95) < 0.007);
}

TEST_CASE("closed-form bias values") {
  CHECK(harness::theory_bias(100.0, 25.0, 400.0, 400.0) == 0.0);
  CHECK(harness::theory_bias(300.0, 50.0, 400.0, 0.0) ==
        doctest::Approx(42.857142857).epsilon(1e-9));
  CHECK(harness::theory_bias(300.0, 50.0, 0.0, 400.0) ==
        doctest::Approx(-42.857142857).epsilon(1e-9));
}

TEST_CASE("closed-form variance inflation values") {
  CHECK(harness::theory_var_inflation(0.90, 0.05, 0.05) == doctest::Approx(0.10));
  CHECK(harness::theory_var_inflation(0.5, 0.3, 0.0) == 0.0);
  CHECK_THROWS_AS(harness::theory_var_inflation(1.0, 0.0, 0.1), tpsim::Error);

  // The standard discontinuation settings: 10/20/50% with half withdrawing.
  const double g10 = harness::theory_var_inflation(0.90, 0.05, 0.05);
  const double g20 = harness::theory_var_inflation(0.80, 0.10, 0.10);
  const double g50 = harness::theory_var_inflation(0.50, 0.25, 0.25);
  CHECK(g10 == doctest::Approx(0.10));
  CHECK(g20 == doctest::Approx(0.20));
  CHECK(g50 == doctest::Approx(0.50));
  CHECK(harness::theory_effect_inflation(g10, g10) == doctest::Approx(0.10));
  CHECK(harness::theory_effect_inflation(g10, g20) == doctest::Approx(0.15));
  CHECK(harness::theory_effect_inflation(g20, g20) == doctest::Approx(0.20));
  CHECK(harness::theory_effect_inflation(g50, g50) == doctest::Approx(0.50));
}

TEST_CASE("metrics csv round-trips exactly") {
  std::vector<MetricsRow> rows;
  stat::RngStream rng(81, 0);
  for (int id : {1, 2}) {
    for (AnalysisModel model :
         {AnalysisModel::FULL, AnalysisModel::CICS, AnalysisModel::PICS_R}) {
      for (auto estimand : {harness::Estimand::Effect, harness::Estimand::MeanControl,
                            harness::Estimand::MeanActive}) {
        MetricsRow row;
        row.scenario_id = id;
        row.model = model;
        row.estimand = estimand;
        row.n_sims = 250;
        row.conv_rate = 1.0;
        row.bias = 10.0 * rng.normal();
        row.mcse_bias = rng.uniform();
        row.mean_halfwidth = 60.0 + rng.normal();
        row.halfwidth_change_vs_full = 5.0 * rng.normal();
        row.coverage = 0.95 + 0.01 * rng.normal();
        row.mcse_coverage = 0.005 * rng.uniform();
        rows.push_back(row);
      }
    }
  }
  std::stringstream buffer;
  harness::write_metrics_csv(buffer, rows);
  const std::vector<MetricsRow> parsed = harness::read_metrics_csv(buffer);
  REQUIRE(parsed.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(parsed[i].scenario_id == rows[i].scenario_id);
    CHECK(parsed[i].model == rows[i].model);
    CHECK(parsed[i].estimand == rows[i].estimand);
    CHECK(parsed[i].n_sims == rows[i].n_sims);
    CHECK(parsed[i].conv_rate == rows[i].conv_rate);
    CHECK(parsed[i].bias == rows[i].bias);
    CHECK(parsed[i].mcse_bias == rows[i].mcse_bias);
    CHECK(parsed[i].mean_halfwidth == rows[i].mean_halfwidth);
    CHECK(parsed[i].halfwidth_change_vs_full == rows[i].halfwidth_change_vs_full);
    CHECK(parsed[i].coverage == rows[i].coverage);
    CHECK(parsed[i].mcse_coverage == rows[i].mcse_coverage);
  }
}

TEST_CASE("report writes the csv and one heatmap per trajectory") {
  std::vector<MetricsRow> rows;
  for (int id : {1, 2}) {
    for (AnalysisModel model :
         {AnalysisModel::FULL, AnalysisModel::CICS, AnalysisModel::PICS}) {
      for (auto estimand : {harness::Estimand::Effect, harness::Estimand::MeanControl}) {
        MetricsRow row;
        row.scenario_id = id;
        row.model = model;
        row.estimand = estimand;
        row.n_sims = 10;
        row.conv_rate = 1.0;
        row.bias = 3.0;
        row.coverage = 0.95;
        rows.push_back(row);
      }
    }
  }
  const auto dir = std::filesystem::temp_directory_path() / "tpsim_report_test";
  std::filesystem::remove_all(dir);
  const std::vector<std::string> files = harness::report(rows, dir.string());
  REQUIRE(files.size() == 2);  // metrics.csv + one RTB heatmap

  std::ifstream svg(files[1]);
  REQUIRE(svg.good());
  std::stringstream buffer;
  buffer << svg.rdbuf();
  const std::string content = buffer.str();
  std::size_t cells = 0, pos = 0;
  while ((pos = content.find("class=\"cell\"", pos)) != std::string::npos) {
    ++cells;
    pos += 1;
  }
  CHECK(cells == 2u * 3u * 3u);  // scenarios x models x panels

  CHECK_THROWS_AS(harness::report({}, dir.string()), tpsim::EmptyReport);
}

TEST_CASE("grid runs are independent of the thread count") {
  harness::RunConfig cfg;
  trial::Scenario s = trial::scenario_grid()[0];
  s.dgm.n_per_arm = 40;
  cfg.scenarios = {s};
  cfg.n_sims = 4;
  cfg.imputations = 4;
  cfg.models = {AnalysisModel::FULL, AnalysisModel::MMRM, AnalysisModel::CICS,
                AnalysisModel::OICS_R};
  cfg.seed = 2024;

  cfg.threads = 1;
  const auto rows_single = harness::run_grid(cfg);
  cfg.threads = 2;
  const auto rows_multi = harness::run_grid(cfg);
  REQUIRE(rows_single.size() == rows_multi.size());
  for (std::size_t i = 0; i < rows_single.size(); ++i) {
    CHECK(rows_single[i].scenario_id == rows_multi[i].scenario_id);
    CHECK(rows_single[i].model == rows_multi[i].model);
    CHECK(rows_single[i].bias == rows_multi[i].bias);
    CHECK(rows_single[i].mean_halfwidth == rows_multi[i].mean_halfwidth);
    CHECK(rows_single[i].coverage == rows_multi[i].coverage);
  }

  // FULL anchors the run: full convergence and zero halfwidth change.
  for (const MetricsRow& row : rows_single) {
    if (row.model == AnalysisModel::FULL) {
      CHECK(row.conv_rate == 1.0);
      CHECK(row.halfwidth_change_vs_full == 0.0);
    }
  }
}

TEST_CASE("config validation rejects an empty model subset") {
  harness::RunConfig cfg;
  cfg.scenarios = {trial::scenario_grid()[0]};
  cfg.models.clear();
  CHECK_THROWS_AS(cfg.validate(), tpsim::Error);
}
