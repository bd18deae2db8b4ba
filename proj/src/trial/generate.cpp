#include "tpsim/trial/generate.hpp"

#include "tpsim/stat/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace tpsim::trial {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double logit(double u) { return std::log(u / (1.0 - u)); }

}  // namespace

PotentialOutcomes generate_potential_outcomes(Arm arm, Trajectory trajectory,
                                              const DgmParams& dgm,
                                              stat::RngStream& rng) {
  const bool active = arm == Arm::Active;
  Vector draw = stat::mvn_sample(dgm.mu_control, dgm.sigma, rng);
  const double u = dgm.theta_on * rng.normal();
  const double v = dgm.theta_off * rng.normal();

  PotentialOutcomes out;
  for (int j = 0; j < 4; ++j) {
    out.y_on(j) = draw(j) + (active ? dgm.delta(j) : 0.0) + u;
  }
  for (int k = 0; k < 3; ++k) {
    const int j = k + 1;
    if (trajectory == Trajectory::ReturnToBaseline) {
      out.y_off(k) = out.y_on(j) - dgm.mu_control(j) -
                     (active ? dgm.delta(j) : 0.0) + dgm.mu_control(0) + v;
    } else {
      out.y_off(k) = out.y_on(j) + (active ? 0.0 : dgm.delta(j)) + v;
    }
  }
  return out;
}

std::array<int, 3> disc_counts(int n_arm, double rate) {
  const std::array<double, 3> split{0.5, 0.3, 0.2};
  std::array<int, 3> counts{};
  double cumulative = 0.0;
  int assigned = 0;
  for (int j = 0; j < 3; ++j) {
    cumulative += rate * n_arm * split[j];
    const int target = static_cast<int>(std::floor(cumulative + 0.5));
    counts[j] = target - assigned;
    assigned = target;
  }
  return counts;
}

void select_discontinuations(std::vector<SubjectRecord*>& arm_subjects,
                             Mechanism mechanism, const std::array<int, 3>& counts,
                             const DgmParams& dgm, stat::RngStream& rng) {
  for (int j = 1; j <= 3; ++j) {
    const int needed = counts[static_cast<std::size_t>(j - 1)];
    std::vector<SubjectRecord*> pool;
    pool.reserve(arm_subjects.size());
    for (SubjectRecord* subject : arm_subjects) {
      if (subject->disc_time == 0) pool.push_back(subject);
    }
    if (needed > static_cast<int>(pool.size())) {
      throw InfeasibleCounts("select_discontinuations: pool of " +
                             std::to_string(pool.size()) + " cannot supply " +
                             std::to_string(needed) + " at timepoint " +
                             std::to_string(j));
    }
    if (needed == 0) continue;

    const double sigma_j = std::sqrt(dgm.sigma(j, j) + dgm.theta_on * dgm.theta_on);
    const double omega = 0.5 / sigma_j;
    // DAR conditions on the previous on-treatment value, DNAR on the next.
    const int value_index = (mechanism == Mechanism::DAR) ? j - 1 : j;
    const bool take_highest = (mechanism == Mechanism::DNAR2 && j == 1);

    std::vector<std::pair<double, SubjectRecord*>> ranked;
    ranked.reserve(pool.size());
    for (SubjectRecord* subject : pool) {
      const double kappa =
          omega * subject->y_on(value_index) - logit(rng.uniform());
      ranked.emplace_back(kappa, subject);
    }
    std::sort(ranked.begin(), ranked.end(),
              [take_highest](const auto& a, const auto& b) {
                if (a.first != b.first) {
                  return take_highest ? a.first > b.first : a.first < b.first;
                }
                return a.second->id < b.second->id;
              });
    for (int k = 0; k < needed; ++k) {
      ranked[static_cast<std::size_t>(k)].second->disc_time = j;
    }
  }
}

double withdrawal_prob(WithdrawalBalance balance, int disc_time) {
  if (disc_time < 1 || disc_time > 3) {
    throw Error("withdrawal_prob: disc_time must be 1..3");
  }
  switch (balance) {
    case WithdrawalBalance::Balanced: return 0.5;
    case WithdrawalBalance::MoreEarly: return disc_time == 1 ? 0.8 : 0.2;
    case WithdrawalBalance::MoreLate: return disc_time == 1 ? 0.2 : 0.8;
  }
  return 0.5;
}

void apply_withdrawal(std::vector<SubjectRecord>& subjects,
                      WithdrawalBalance balance, stat::RngStream& rng) {
  for (SubjectRecord& subject : subjects) {
    if (subject.disc_time != 0) {
      subject.withdrawn = rng.uniform() < withdrawal_prob(balance, subject.disc_time);
    }
    for (int j = 0; j < 4; ++j) {
      const bool missing =
          subject.withdrawn && j >= subject.disc_time && subject.disc_time != 0;
      subject.observed(j) = missing ? kNaN : subject.policy_outcome(j);
    }
  }
}

TrueEstimand true_estimand(const Scenario& scenario, int timepoint) {
  if (timepoint < 1 || timepoint > 3) {
    throw Error("true_estimand: timepoint must be 1..3");
  }
  const DgmParams& dgm = scenario.dgm;
  const std::array<double, 3> cum_split{0.5, 0.8, 1.0};
  const double cum = cum_split[static_cast<std::size_t>(timepoint - 1)];

  auto mean_change = [&](Arm arm) {
    const bool active = arm == Arm::Active;
    const double rate = active ? scenario.disc_rate_active : scenario.disc_rate_control;
    const double weight_off = rate * cum;
    const double mu_on = dgm.mu_control(timepoint) + (active ? dgm.delta(timepoint) : 0.0);
    const double mu_off = scenario.trajectory == Trajectory::ReturnToBaseline
                              ? dgm.mu_control(0)
                              : dgm.mu_control(timepoint) + dgm.delta(timepoint);
    const double baseline = dgm.mu_control(0) + (active ? dgm.delta(0) : 0.0);
    return (1.0 - weight_off) * mu_on + weight_off * mu_off - baseline;
  };

  TrueEstimand truth;
  truth.mean_change_control = 1000.0 * mean_change(Arm::Control);
  truth.mean_change_active = 1000.0 * mean_change(Arm::Active);
  truth.effect = truth.mean_change_active - truth.mean_change_control;
  return truth;
}

TrialDataset generate_trial(const Scenario& scenario, int replicate_id,
                            std::uint64_t seed) {
  scenario.validate();
  const int n = scenario.dgm.n_per_arm;
  stat::RngStream base = stat::RngStream(seed, 0)
                             .derive(static_cast<std::uint64_t>(scenario.id))
                             .derive(static_cast<std::uint64_t>(replicate_id));
  stat::RngStream outcomes_root = base.derive(1);
  stat::RngStream selection_root = base.derive(2);
  stat::RngStream withdrawal_stream = base.derive(3);

  TrialDataset dataset;
  dataset.scenario = scenario;
  dataset.replicate_id = replicate_id;
  dataset.subjects.resize(static_cast<std::size_t>(2 * n));
  for (int i = 0; i < 2 * n; ++i) {
    SubjectRecord& subject = dataset.subjects[static_cast<std::size_t>(i)];
    subject.id = i;
    subject.arm = i < n ? Arm::Control : Arm::Active;
    stat::RngStream rng = outcomes_root.derive(static_cast<std::uint64_t>(i));
    const PotentialOutcomes outcomes = generate_potential_outcomes(
        subject.arm, scenario.trajectory, scenario.dgm, rng);
    subject.y_on = outcomes.y_on;
    subject.y_off = outcomes.y_off;
  }

  for (Arm arm : {Arm::Control, Arm::Active}) {
    std::vector<SubjectRecord*> arm_subjects;
    arm_subjects.reserve(static_cast<std::size_t>(n));
    for (SubjectRecord& subject : dataset.subjects) {
      if (subject.arm == arm) arm_subjects.push_back(&subject);
    }
    const double rate =
        arm == Arm::Control ? scenario.disc_rate_control : scenario.disc_rate_active;
    stat::RngStream rng = selection_root.derive(arm == Arm::Control ? 0 : 1);
    select_discontinuations(arm_subjects, scenario.mechanism, disc_counts(n, rate),
                            scenario.dgm, rng);
  }

  apply_withdrawal(dataset.subjects, scenario.balance, withdrawal_stream);
  return dataset;
}

void write_dataset_csv(std::ostream& out, const TrialDataset& dataset, bool header) {
  if (header) {
    out << "id,arm,y0,y1,y2,y3,disc_time,withdrawn,replicate,scenario_id\n";
  }
  for (const SubjectRecord& subject : dataset.subjects) {
    out << subject.id << ',' << to_string(subject.arm);
    for (int j = 0; j < 4; ++j) {
      out << ',';
      if (subject.has_observed(j)) out << subject.observed(j);
    }
    out << ',' << subject.disc_time << ',' << (subject.withdrawn ? 1 : 0) << ','
        << dataset.replicate_id << ',' << dataset.scenario.id << '\n';
  }
}

}  // namespace tpsim::trial
