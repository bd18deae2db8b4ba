#pragma once

#include "tpsim/common.hpp"
#include "tpsim/stat/rng.hpp"
#include "tpsim/trial/scenario.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace tpsim::trial {

// One simulated subject. Potential outcomes are kept alongside the
// observed (post-withdrawal) values; missing entries of `observed` are
// NaN. disc_time is 0 for completers, otherwise the first off-treatment
// timepoint (1..3), and is known even when outcomes are missing.
struct SubjectRecord {
  int id = 0;
  Arm arm = Arm::Control;
  Eigen::Vector4d y_on = Eigen::Vector4d::Zero();
  Eigen::Vector3d y_off = Eigen::Vector3d::Zero();  // timepoints 1..3
  int disc_time = 0;
  bool withdrawn = false;
  Eigen::Vector4d observed = Eigen::Vector4d::Zero();

  bool discontinued_by(int timepoint) const {
    return disc_time != 0 && disc_time <= timepoint;
  }
  bool has_observed(int timepoint) const {
    return !std::isnan(observed(timepoint));
  }
  /// Treatment-policy outcome before any withdrawal: on-treatment until
  /// disc_time, off-treatment from then on.
  double policy_outcome(int timepoint) const {
    if (timepoint >= 1 && discontinued_by(timepoint)) return y_off(timepoint - 1);
    return y_on(timepoint);
  }
};

struct TrialDataset {
  Scenario scenario;
  int replicate_id = 0;
  std::vector<SubjectRecord> subjects;
};

struct PotentialOutcomes {
  Eigen::Vector4d y_on;
  Eigen::Vector3d y_off;
};

/// Draws one subject's correlated on-treatment vector and the matched
/// off-treatment vector for the scenario's trajectory.
PotentialOutcomes generate_potential_outcomes(Arm arm, Trajectory trajectory,
                                              const DgmParams& dgm,
                                              stat::RngStream& rng);

/// Exact per-timepoint discontinuation counts from the 5:3:2 split of
/// rate * n, rounding cumulative targets half-up and differencing.
std::array<int, 3> disc_counts(int n_arm, double rate);

/// Sequentially assigns disc_time within one arm by ranking the logistic
/// propensity measure; counts[j-1] subjects leave at step j. Subjects must
/// all belong to the same arm and have disc_time == 0 on entry.
void select_discontinuations(std::vector<SubjectRecord*>& arm_subjects,
                             Mechanism mechanism, const std::array<int, 3>& counts,
                             const DgmParams& dgm, stat::RngStream& rng);

double withdrawal_prob(WithdrawalBalance balance, int disc_time);

/// MCAR withdrawal among discontinued subjects; withdrawn subjects lose
/// all outcomes from disc_time onward. Also fills `observed` for everyone.
void apply_withdrawal(std::vector<SubjectRecord>& subjects,
                      WithdrawalBalance balance, stat::RngStream& rng);

struct TrueEstimand {
  double mean_change_control = 0.0;  // mL
  double mean_change_active = 0.0;   // mL
  double effect = 0.0;               // mL
};

/// Analytic treatment-policy expected values: mixture of on- and
/// off-treatment means with weights from the cumulative 5:3:2 split.
TrueEstimand true_estimand(const Scenario& scenario, int timepoint);

/// Complete replicate: potential outcomes, ranked discontinuation with
/// exact counts, MCAR withdrawal. Deterministic in (scenario.id,
/// replicate_id, seed).
TrialDataset generate_trial(const Scenario& scenario, int replicate_id,
                            std::uint64_t seed);

/// CSV export, one row per subject: id, arm, y0..y3 (empty = missing),
/// disc_time (0 = completer), withdrawn, replicate, scenario_id.
void write_dataset_csv(std::ostream& out, const TrialDataset& dataset,
                       bool header = true);

}  // namespace tpsim::trial
