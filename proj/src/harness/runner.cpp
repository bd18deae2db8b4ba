#include "tpsim/harness/runner.hpp"

#include "tpsim/analyze/ancova.hpp"
#include "tpsim/analyze/mmrm.hpp"
#include "tpsim/analyze/pool.hpp"
#include "tpsim/mi/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace tpsim::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kStableEffectLimit = 1e6;  // mL

bool stable(const ModelOutcome& outcome) {
  for (const ComponentOutcome& component : outcome.components) {
    if (!std::isfinite(component.point) || !std::isfinite(component.ci.low) ||
        !std::isfinite(component.ci.high)) {
      return false;
    }
    if (component.ci.high <= component.ci.low) return false;  // zero variance
  }
  return std::fabs(outcome.components[0].point) < kStableEffectLimit;
}

ComponentOutcome from_component(const analyze::Component& component) {
  ComponentOutcome out;
  out.point = component.point;
  out.ci = analyze::t_interval(component);
  return out;
}

ComponentOutcome from_pooled(const analyze::PooledEstimate& pooled) {
  ComponentOutcome out;
  out.point = pooled.point;
  out.ci = {pooled.ci_low, pooled.ci_high};
  return out;
}

std::vector<AnalysisModel> canonical_models(const std::vector<AnalysisModel>& requested) {
  std::vector<AnalysisModel> models;
  for (AnalysisModel model : kAllAnalysisModels) {
    const bool wanted = model == AnalysisModel::FULL ||
                        std::find(requested.begin(), requested.end(), model) !=
                            requested.end();
    if (wanted) models.push_back(model);
  }
  return models;
}

}  // namespace

void RunConfig::validate() const {
  if (scenarios.empty()) throw Error("run config: no scenarios selected");
  if (models.empty()) throw Error("run config: empty model subset");
  if (n_sims < 1) throw Error("run config: n_sims must be positive");
  if (imputations < 2) throw Error("run config: needs at least 2 imputations");
  for (const trial::Scenario& scenario : scenarios) scenario.validate();
}

RunConfig desk_profile() {
  RunConfig cfg;
  cfg.n_sims = 250;
  const std::vector<trial::Scenario> grid = trial::scenario_grid();
  for (int id : trial::desk_scenario_ids()) {
    cfg.scenarios.push_back(grid[static_cast<std::size_t>(id - 1)]);
  }
  return cfg;
}

RunConfig full_profile() {
  RunConfig cfg;
  cfg.n_sims = 1000;
  cfg.scenarios = trial::scenario_grid();
  return cfg;
}

std::vector<ModelOutcome> analyze_replicate(const trial::TrialDataset& dataset,
                                            const std::vector<AnalysisModel>& models,
                                            int imputations, std::uint64_t seed) {
  const Index n = static_cast<Index>(dataset.subjects.size());
  std::vector<trial::Arm> arm(static_cast<std::size_t>(n));
  Matrix full(n, 4);
  Matrix observed(n, 4);
  for (Index i = 0; i < n; ++i) {
    const auto& subject = dataset.subjects[static_cast<std::size_t>(i)];
    arm[static_cast<std::size_t>(i)] = subject.arm;
    for (int j = 0; j < 4; ++j) {
      full(i, j) = subject.policy_outcome(j);
      observed(i, j) =
          subject.has_observed(j) ? subject.observed(j) : kNaN;
    }
  }
  const double complete_df = static_cast<double>(n - 3);

  std::vector<ModelOutcome> outcomes;
  outcomes.reserve(models.size());
  for (AnalysisModel model : models) {
    ModelOutcome outcome;
    try {
      if (model == AnalysisModel::FULL) {
        const analyze::EstimateTriple triple = analyze::ancova(full, arm, 3);
        outcome.components = {from_component(triple.effect),
                              from_component(triple.mean_change_control),
                              from_component(triple.mean_change_active)};
        outcome.converged = true;
      } else if (model == AnalysisModel::MMRM) {
        const analyze::MmrmFit fit = analyze::mmrm(observed, arm);
        outcome.components = {from_component(fit.estimates.effect),
                              from_component(fit.estimates.mean_change_control),
                              from_component(fit.estimates.mean_change_active)};
        outcome.converged = fit.converged && !fit.singular;
      } else {
        mi::ImputationConfig cfg;
        cfg.m = imputations;
        cfg.seed = seed;
        const mi::CompletedData completed =
            mi::impute(dataset, model::builtin_spec(mi_model_name(model)), cfg);
        if (completed.all_ok()) {
          std::vector<analyze::EstimateTriple> triples;
          triples.reserve(completed.copies.size());
          for (const Matrix& copy : completed.copies) {
            triples.push_back(analyze::ancova(copy, arm, 3));
          }
          const analyze::PooledTriple pooled =
              analyze::pool_triples(triples, complete_df);
          outcome.components = {from_pooled(pooled.effect),
                                from_pooled(pooled.mean_change_control),
                                from_pooled(pooled.mean_change_active)};
          outcome.converged = true;
        }
      }
    } catch (const Error&) {
      outcome.converged = false;
    }
    if (outcome.converged) outcome.converged = stable(outcome);
    outcomes.push_back(outcome);
  }
  return outcomes;
}

std::vector<MetricsRow> run_grid(const RunConfig& cfg) {
  cfg.validate();
  const std::vector<AnalysisModel> models = canonical_models(cfg.models);
  const std::size_t n_scenarios = cfg.scenarios.size();
  const std::size_t n_sims = static_cast<std::size_t>(cfg.n_sims);

  // results[scenario][replicate][model]
  std::vector<std::vector<std::vector<ModelOutcome>>> results(
      n_scenarios, std::vector<std::vector<ModelOutcome>>(n_sims));

  const std::size_t n_tasks = n_scenarios * n_sims;
  std::atomic<std::size_t> next_task{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t task = next_task.fetch_add(1);
      if (task >= n_tasks) return;
      const std::size_t scenario_index = task / n_sims;
      const int replicate = static_cast<int>(task % n_sims);
      const trial::TrialDataset dataset = trial::generate_trial(
          cfg.scenarios[scenario_index], replicate, cfg.seed);
      results[scenario_index][static_cast<std::size_t>(replicate)] =
          analyze_replicate(dataset, models, cfg.imputations, cfg.seed);
    }
  };

  unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::thread::hardware_concurrency();
  n_threads = std::max(1u, std::min(n_threads, static_cast<unsigned>(n_tasks)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (std::thread& thread : threads) thread.join();
  }

  // Deterministic reduction in (scenario, model, estimand) order.
  std::vector<MetricsRow> rows;
  const std::array<Estimand, 3> estimands{Estimand::Effect, Estimand::MeanControl,
                                          Estimand::MeanActive};
  for (std::size_t s = 0; s < n_scenarios; ++s) {
    const trial::Scenario& scenario = cfg.scenarios[s];
    const trial::TrueEstimand truth = trial::true_estimand(scenario, 3);
    const std::array<double, 3> truth_by_estimand{
        truth.effect, truth.mean_change_control, truth.mean_change_active};

    std::array<double, 3> full_halfwidth{kNaN, kNaN, kNaN};
    for (std::size_t mi_model = 0; mi_model < models.size(); ++mi_model) {
      if (models[mi_model] != AnalysisModel::FULL) continue;
      for (std::size_t e = 0; e < 3; ++e) {
        double sum = 0.0;
        int count = 0;
        for (std::size_t r = 0; r < n_sims; ++r) {
          const ModelOutcome& outcome = results[s][r][mi_model];
          if (!outcome.converged) continue;
          sum += 0.5 * (outcome.components[e].ci.high - outcome.components[e].ci.low);
          ++count;
        }
        if (count > 0) full_halfwidth[e] = sum / count;
      }
    }

    for (std::size_t m = 0; m < models.size(); ++m) {
      for (std::size_t e = 0; e < 3; ++e) {
        MetricsRow row;
        row.scenario_id = scenario.id;
        row.model = models[m];
        row.estimand = estimands[e];
        row.n_sims = cfg.n_sims;

        double sum_point = 0.0, sum_sq = 0.0, sum_halfwidth = 0.0;
        int n_conv = 0;
        std::vector<analyze::Interval> intervals;
        intervals.reserve(n_sims);
        for (std::size_t r = 0; r < n_sims; ++r) {
          const ModelOutcome& outcome = results[s][r][m];
          if (!outcome.converged) continue;
          const ComponentOutcome& component = outcome.components[e];
          sum_point += component.point;
          sum_sq += component.point * component.point;
          sum_halfwidth += 0.5 * (component.ci.high - component.ci.low);
          intervals.push_back(component.ci);
          ++n_conv;
        }
        row.conv_rate = static_cast<double>(n_conv) / static_cast<double>(n_sims);
        if (n_conv > 0) {
          const double mean = sum_point / n_conv;
          row.bias = mean - truth_by_estimand[e];
          const double var =
              n_conv > 1 ? (sum_sq - n_conv * mean * mean) / (n_conv - 1) : 0.0;
          row.mcse_bias = std::sqrt(std::max(0.0, var) / n_conv);
          row.mean_halfwidth = sum_halfwidth / n_conv;
          const CoverageResult cover = coverage(intervals, truth_by_estimand[e]);
          row.coverage = cover.fraction;
          row.mcse_coverage = cover.mc_se;
          if (models[m] == AnalysisModel::FULL) {
            row.halfwidth_change_vs_full = 0.0;
          } else if (std::isfinite(full_halfwidth[e]) && full_halfwidth[e] > 0.0) {
            row.halfwidth_change_vs_full =
                100.0 * (row.mean_halfwidth / full_halfwidth[e] - 1.0);
          } else {
            row.halfwidth_change_vs_full = kNaN;
          }
        } else {
          row.bias = kNaN;
          row.mcse_bias = kNaN;
          row.mean_halfwidth = kNaN;
          row.halfwidth_change_vs_full = kNaN;
          row.coverage = kNaN;
          row.mcse_coverage = kNaN;
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace tpsim::harness
