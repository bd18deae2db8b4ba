#pragma once

#include "tpsim/common.hpp"
#include "tpsim/model/design.hpp"
#include "tpsim/model/spec.hpp"
#include "tpsim/stat/rng.hpp"
#include "tpsim/trial/generate.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace tpsim::mi {

struct ImputationConfig {
  int m = 25;
  std::uint64_t seed = 0;
  std::uint64_t stream_tag = 0;  // extra stream coordinate mixed in by callers
  Index min_resid_df = 1;
  double sigma_floor = 1e-10;
};

struct CopyStatus {
  bool ok = true;
  int timepoint = 0;  // failed step
  std::string group;
  std::string reason;
};

struct StepDiagnostics {
  std::string group;
  int timepoint = 0;
  Index rows_used = 0;
  Index rank = 0;
  Index resid_df = 0;
  bool skipped = false;  // nothing to impute at this step
  std::vector<std::string> dropped_levels;
};

// M completed copies of one dataset. Copies hold the n x 4 outcome matrix
// with every cell filled when the copy is ok; observed values are never
// altered. Diagnostics describe the by-group fits of the first copy (rows,
// rank and residual df are data properties shared by all copies).
struct CompletedData {
  model::ModelName model = model::ModelName::CICS;
  std::vector<Matrix> copies;
  std::vector<CopyStatus> status;
  std::vector<StepDiagnostics> diagnostics;

  bool all_ok() const;
  std::string first_failure() const;
};

/// Sequential monotone multiple imputation of `dataset` under `spec`,
/// separately by treatment arm (and final pattern for by-pattern models).
/// Deterministic given (cfg.seed, cfg.stream_tag, scenario id, replicate,
/// copy). A failed step marks only that copy failed.
CompletedData impute(const trial::TrialDataset& dataset, const model::ModelSpec& spec,
                     const ImputationConfig& cfg);

/// Frame over all subjects with Y0..Y3 (NaN = missing) and the derived
/// D/P factors.
model::ModelFrame make_frame(const std::vector<trial::SubjectRecord>& subjects);

/// Centered residuals y - (drawn intercept + class contribution at each
/// row's own level); slope and interaction columns do not contribute.
Vector update_residuals(const model::ModelFrame& frame,
                        const model::CompiledDesign& design, const Vector& y_current,
                        const std::vector<Index>& rows, const Vector& coeff_draw);

/// Audit dump: dataset schema plus a leading copy index, one block per copy.
void write_completed_csv(std::ostream& out, const trial::TrialDataset& dataset,
                         const CompletedData& completed);

}  // namespace tpsim::mi
