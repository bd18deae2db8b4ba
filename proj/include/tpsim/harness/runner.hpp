#pragma once

#include "tpsim/harness/metrics.hpp"
#include "tpsim/trial/generate.hpp"

#include <cstdint>
#include <vector>

namespace tpsim::harness {

inline constexpr std::uint64_t kDefaultSeed = 20250808ULL;

struct RunConfig {
  std::vector<trial::Scenario> scenarios;
  int n_sims = 1000;
  std::vector<AnalysisModel> models{kAllAnalysisModels.begin(),
                                    kAllAnalysisModels.end()};
  int imputations = 25;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

/// 12 representative cells, 250 replicates.
RunConfig desk_profile();

/// The full 72 x 1000 grid.
RunConfig full_profile();

// Per-replicate outcome of one analysis model, in Estimand order
// (effect, mean_control, mean_active).
struct ComponentOutcome {
  double point = 0.0;  // mL
  analyze::Interval ci;
};

struct ModelOutcome {
  bool converged = false;
  std::array<ComponentOutcome, 3> components{};
};

/// Runs every requested model on one generated replicate. Exposed for the
/// test suites; run_grid aggregates these.
std::vector<ModelOutcome> analyze_replicate(const trial::TrialDataset& dataset,
                                            const std::vector<AnalysisModel>& models,
                                            int imputations, std::uint64_t seed);

/// Executes the factorial: per scenario and replicate, generates a trial,
/// runs every model, and aggregates bias / halfwidth / coverage against
/// the analytic truth. Deterministic given cfg.seed, independent of
/// thread count. FULL is always included as the halfwidth anchor.
std::vector<MetricsRow> run_grid(const RunConfig& cfg);

}  // namespace tpsim::harness
