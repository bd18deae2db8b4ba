#include "tpsim/trial/generate.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace tpsim;
using trial::Arm;
using trial::DgmParams;
using trial::Mechanism;
using trial::Scenario;
using trial::SubjectRecord;
using trial::Trajectory;
using trial::WithdrawalBalance;

namespace {

Scenario base_scenario() {
  Scenario s;
  s.id = 1;
  s.mechanism = Mechanism::DAR;
  s.disc_rate_control = 0.1;
  s.disc_rate_active = 0.1;
  s.balance = WithdrawalBalance::Balanced;
  s.trajectory = Trajectory::ReturnToBaseline;
  return s;
}

}  // namespace

TEST_CASE("active on-treatment means include the shift") {
  const DgmParams dgm;
  stat::RngStream rng(1, 0);
  const int n = 100000;
  Eigen::Vector4d sum = Eigen::Vector4d::Zero();
  for (int i = 0; i < n; ++i) {
    auto rng_i = rng.derive(static_cast<std::uint64_t>(i));
    sum += trial::generate_potential_outcomes(Arm::Active, Trajectory::SameAsActive,
                                              dgm, rng_i)
               .y_on;
  }
  const Eigen::Vector4d mean = sum / n;
  const double expected[4] = {2.14, 2.57, 2.62, 2.64};
  for (int j = 0; j < 4; ++j) {
    CHECK(std::fabs(mean(j) - expected[j]) < 0.01);
  }
}

TEST_CASE("same-as-active collapses to the on-treatment path for the active arm") {
  DgmParams dgm;
  dgm.theta_off = 0.0;
  stat::RngStream rng(2, 0);
  const auto outcomes = trial::generate_potential_outcomes(
      Arm::Active, Trajectory::SameAsActive, dgm, rng);
  for (int k = 0; k < 3; ++k) {
    CHECK(outcomes.y_off(k) == outcomes.y_on(k + 1));
  }
}

TEST_CASE("return-to-baseline off-treatment means sit at baseline") {
  const DgmParams dgm;
  for (Arm arm : {Arm::Control, Arm::Active}) {
    stat::RngStream rng(3, arm == Arm::Control ? 0 : 1);
    const int n = 100000;
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i) {
      auto rng_i = rng.derive(static_cast<std::uint64_t>(i));
      sum += trial::generate_potential_outcomes(arm, Trajectory::ReturnToBaseline,
                                                dgm, rng_i)
                 .y_off;
    }
    for (int k = 0; k < 3; ++k) {
      CHECK(std::fabs(sum(k) / n - 2.14) < 0.01);
    }
  }
}

TEST_CASE("discontinuation counts follow cumulative half-up rounding") {
  CHECK(trial::disc_counts(375, 0.5) == std::array<int, 3>{94, 56, 38});
  CHECK(trial::disc_counts(375, 0.0) == std::array<int, 3>{0, 0, 0});
  CHECK(trial::disc_counts(10, 0.2) == std::array<int, 3>{1, 1, 0});
  CHECK(trial::disc_counts(375, 0.1) == std::array<int, 3>{19, 11, 8});
  CHECK(trial::disc_counts(375, 0.2) == std::array<int, 3>{38, 22, 15});
  // Everyone discontinues: the split consumes the whole arm.
  const auto all = trial::disc_counts(375, 1.0);
  CHECK(all[0] + all[1] + all[2] == 375);
  CHECK(all == std::array<int, 3>{188, 112, 75});
}

TEST_CASE("zero counts select nobody") {
  std::vector<SubjectRecord> subjects(20);
  for (int i = 0; i < 20; ++i) subjects[static_cast<std::size_t>(i)].id = i;
  std::vector<SubjectRecord*> pointers;
  for (auto& s : subjects) pointers.push_back(&s);
  stat::RngStream rng(4, 0);
  trial::select_discontinuations(pointers, Mechanism::DAR, {0, 0, 0}, DgmParams{}, rng);
  for (const auto& s : subjects) CHECK(s.disc_time == 0);
}

TEST_CASE("DNAR1 selects the worse outcomes") {
  DgmParams dgm;
  dgm.n_per_arm = 10000;
  stat::RngStream outcome_rng(5, 0);
  std::vector<SubjectRecord> subjects(static_cast<std::size_t>(dgm.n_per_arm));
  double arm_mean = 0.0;
  for (int i = 0; i < dgm.n_per_arm; ++i) {
    auto& subject = subjects[static_cast<std::size_t>(i)];
    subject.id = i;
    auto rng_i = outcome_rng.derive(static_cast<std::uint64_t>(i));
    const auto outcomes = trial::generate_potential_outcomes(
        Arm::Control, Trajectory::ReturnToBaseline, dgm, rng_i);
    subject.y_on = outcomes.y_on;
    subject.y_off = outcomes.y_off;
    arm_mean += subject.y_on(1);
  }
  arm_mean /= dgm.n_per_arm;

  std::vector<SubjectRecord*> pointers;
  for (auto& s : subjects) pointers.push_back(&s);
  stat::RngStream rng(5, 1);
  trial::select_discontinuations(pointers, Mechanism::DNAR1, {2500, 0, 0}, dgm, rng);

  double selected_mean = 0.0;
  int selected = 0;
  for (const auto& s : subjects) {
    if (s.disc_time == 1) {
      selected_mean += s.y_on(1);
      ++selected;
    }
  }
  REQUIRE(selected == 2500);
  selected_mean /= selected;
  CHECK(arm_mean - selected_mean > 0.1);
}

TEST_CASE("DNAR2 reverses the ranking at the first timepoint") {
  DgmParams dgm;
  dgm.n_per_arm = 10000;
  stat::RngStream outcome_rng(6, 0);
  std::vector<SubjectRecord> subjects(static_cast<std::size_t>(dgm.n_per_arm));
  double arm_mean = 0.0;
  for (int i = 0; i < dgm.n_per_arm; ++i) {
    auto& subject = subjects[static_cast<std::size_t>(i)];
    subject.id = i;
    auto rng_i = outcome_rng.derive(static_cast<std::uint64_t>(i));
    subject.y_on = trial::generate_potential_outcomes(
                       Arm::Active, Trajectory::SameAsActive, dgm, rng_i)
                       .y_on;
    arm_mean += subject.y_on(1);
  }
  arm_mean /= dgm.n_per_arm;

  std::vector<SubjectRecord*> pointers;
  for (auto& s : subjects) pointers.push_back(&s);
  stat::RngStream rng(6, 1);
  trial::select_discontinuations(pointers, Mechanism::DNAR2, {2500, 0, 0}, dgm, rng);

  double selected_mean = 0.0;
  int selected = 0;
  for (const auto& s : subjects) {
    if (s.disc_time == 1) {
      selected_mean += s.y_on(1);
      ++selected;
    }
  }
  selected_mean /= selected;
  CHECK(selected_mean - arm_mean > 0.1);
}

TEST_CASE("infeasible counts are rejected") {
  std::vector<SubjectRecord> subjects(3);
  std::vector<SubjectRecord*> pointers;
  for (auto& s : subjects) pointers.push_back(&s);
  stat::RngStream rng(7, 0);
  CHECK_THROWS_AS(trial::select_discontinuations(pointers, Mechanism::DAR, {5, 0, 0},
                                                 DgmParams{}, rng),
                  tpsim::InfeasibleCounts);
}

TEST_CASE("withdrawal probability table") {
  CHECK(trial::withdrawal_prob(WithdrawalBalance::Balanced, 2) == 0.5);
  CHECK(trial::withdrawal_prob(WithdrawalBalance::MoreEarly, 1) == 0.8);
  CHECK(trial::withdrawal_prob(WithdrawalBalance::MoreEarly, 3) == 0.2);
  CHECK(trial::withdrawal_prob(WithdrawalBalance::MoreLate, 1) == 0.2);
  CHECK(trial::withdrawal_prob(WithdrawalBalance::MoreLate, 2) == 0.8);
  // The 5:3:2 weighted average is 50% for every balance.
  for (auto balance : {WithdrawalBalance::Balanced, WithdrawalBalance::MoreEarly,
                       WithdrawalBalance::MoreLate}) {
    const double avg = 0.5 * trial::withdrawal_prob(balance, 1) +
                       0.3 * trial::withdrawal_prob(balance, 2) +
                       0.2 * trial::withdrawal_prob(balance, 3);
    CHECK(avg == doctest::Approx(0.5));
  }
}

TEST_CASE("withdrawal marks the monotone tail as missing") {
  std::vector<SubjectRecord> subjects(1);
  subjects[0].disc_time = 2;
  subjects[0].y_on << 1.0, 2.0, 3.0, 4.0;
  subjects[0].y_off << 1.5, 2.5, 3.5;
  stat::RngStream rng(8, 0);
  trial::apply_withdrawal(subjects, WithdrawalBalance::MoreLate, rng);
  if (subjects[0].withdrawn) {
    CHECK(subjects[0].has_observed(0));
    CHECK(subjects[0].has_observed(1));
    CHECK_FALSE(subjects[0].has_observed(2));
    CHECK_FALSE(subjects[0].has_observed(3));
    CHECK(subjects[0].observed(1) == 2.0);  // on-treatment value at t1
  } else {
    CHECK(subjects[0].has_observed(3));
    CHECK(subjects[0].observed(2) == 2.5);  // off-treatment value at t2
  }
}

TEST_CASE("no discontinued subjects means no withdrawals") {
  std::vector<SubjectRecord> subjects(50);
  stat::RngStream rng(9, 0);
  trial::apply_withdrawal(subjects, WithdrawalBalance::Balanced, rng);
  for (const auto& s : subjects) {
    CHECK_FALSE(s.withdrawn);
    for (int j = 0; j < 4; ++j) CHECK(s.has_observed(j));
  }
}

TEST_CASE("withdrawal fraction matches the balance at timepoint 1") {
  const int n = 10000;
  std::vector<SubjectRecord> subjects(static_cast<std::size_t>(n));
  for (auto& s : subjects) s.disc_time = 1;
  stat::RngStream rng(10, 0);
  trial::apply_withdrawal(subjects, WithdrawalBalance::MoreLate, rng);
  int withdrawn = 0;
  for (const auto& s : subjects) withdrawn += s.withdrawn ? 1 : 0;
  const double fraction = static_cast<double>(withdrawn) / n;
  CHECK(std::fabs(fraction - 0.20) < 0.012);
}

TEST_CASE("overall withdrawn fraction among discontinuers approaches one half") {
  // Discontinuation times in the 5:3:2 ratio make the weighted withdrawal
  // probability 0.5 for every balance.
  for (auto balance : {WithdrawalBalance::Balanced, WithdrawalBalance::MoreEarly,
                       WithdrawalBalance::MoreLate}) {
    const int n = 20000;
    std::vector<SubjectRecord> subjects(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const int slot = i % 10;
      subjects[static_cast<std::size_t>(i)].disc_time = slot < 5 ? 1 : slot < 8 ? 2 : 3;
    }
    stat::RngStream rng(11, static_cast<std::uint64_t>(balance));
    trial::apply_withdrawal(subjects, balance, rng);
    int withdrawn = 0;
    for (const auto& s : subjects) withdrawn += s.withdrawn ? 1 : 0;
    const double fraction = static_cast<double>(withdrawn) / n;
    const double mc_se = std::sqrt(0.25 / n);
    CHECK(std::fabs(fraction - 0.5) < 3.0 * mc_se);
  }
}

TEST_CASE("analytic estimand values") {
  Scenario s = base_scenario();

  s.trajectory = Trajectory::ReturnToBaseline;
  s.disc_rate_control = 0.5;
  s.disc_rate_active = 0.5;
  auto truth = trial::true_estimand(s, 3);
  CHECK(truth.mean_change_control == doctest::Approx(200.0));
  CHECK(truth.mean_change_active == doctest::Approx(250.0));
  CHECK(truth.effect == doctest::Approx(50.0));

  s.disc_rate_control = 0.0;
  s.disc_rate_active = 0.0;
  for (auto trajectory : {Trajectory::ReturnToBaseline, Trajectory::SameAsActive}) {
    s.trajectory = trajectory;
    truth = trial::true_estimand(s, 3);
    CHECK(truth.effect == doctest::Approx(100.0));
  }

  s.trajectory = Trajectory::SameAsActive;
  s.disc_rate_control = 0.1;
  s.disc_rate_active = 0.2;
  truth = trial::true_estimand(s, 3);
  CHECK(truth.mean_change_control == doctest::Approx(410.0));
  CHECK(truth.mean_change_active == doctest::Approx(500.0));
  CHECK(truth.effect == doctest::Approx(90.0));
}

TEST_CASE("the scenario grid is the 72-cell cross product") {
  const auto grid = trial::scenario_grid();
  REQUIRE(grid.size() == 72);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(grid[i].id == static_cast<int>(i) + 1);
  }
  // Spot anchors used by the reporting and acceptance layers.
  const Scenario& s18 = grid[17];
  CHECK(s18.trajectory == Trajectory::ReturnToBaseline);
  CHECK(s18.mechanism == Mechanism::DNAR1);
  CHECK(s18.disc_rate_control == 0.1);
  CHECK(s18.disc_rate_active == 0.2);
  CHECK(s18.balance == WithdrawalBalance::MoreLate);

  const Scenario& s71 = grid[70];
  CHECK(s71.trajectory == Trajectory::SameAsActive);
  CHECK(s71.mechanism == Mechanism::DNAR2);
  CHECK(s71.disc_rate_control == 0.5);
  CHECK(s71.balance == WithdrawalBalance::MoreEarly);

  const Scenario& s37 = grid[36];
  CHECK(s37.trajectory == Trajectory::SameAsActive);
  CHECK(s37.mechanism == Mechanism::DAR);
  CHECK(s37.balance == WithdrawalBalance::Balanced);
}

TEST_CASE("realized discontinuation counts are exact per arm and timepoint") {
  Scenario s = base_scenario();
  s.disc_rate_control = 0.2;
  s.disc_rate_active = 0.5;
  const trial::TrialDataset dataset = trial::generate_trial(s, 3, 99);
  for (Arm arm : {Arm::Control, Arm::Active}) {
    const double rate = arm == Arm::Control ? 0.2 : 0.5;
    const auto expected = trial::disc_counts(s.dgm.n_per_arm, rate);
    std::array<int, 3> observed{};
    for (const auto& subject : dataset.subjects) {
      if (subject.arm == arm && subject.disc_time != 0) {
        ++observed[static_cast<std::size_t>(subject.disc_time - 1)];
      }
    }
    CHECK(observed == expected);
  }
}

TEST_CASE("mixture exactness: replicate means track the analytic truth") {
  // Outcome-dependent DNAR selection must not move the policy mean, since
  // the off-treatment values are shifted copies of the on-treatment draws.
  Scenario s = base_scenario();
  s.id = 30;
  s.mechanism = Mechanism::DNAR1;
  s.trajectory = Trajectory::ReturnToBaseline;
  s.disc_rate_control = 0.5;
  s.disc_rate_active = 0.5;
  s.dgm.n_per_arm = 300;

  const int replicates = 200;
  double sum_effect = 0.0, sum_sq = 0.0;
  for (int r = 0; r < replicates; ++r) {
    const trial::TrialDataset dataset = trial::generate_trial(s, r, 1234);
    double mean_c = 0.0, mean_a = 0.0;
    for (const auto& subject : dataset.subjects) {
      const double change = subject.policy_outcome(3) - subject.policy_outcome(0);
      (subject.arm == Arm::Control ? mean_c : mean_a) += change;
    }
    mean_c /= s.dgm.n_per_arm;
    mean_a /= s.dgm.n_per_arm;
    const double effect = 1000.0 * (mean_a - mean_c);
    sum_effect += effect;
    sum_sq += effect * effect;
  }
  const double mean_effect = sum_effect / replicates;
  const double sd = std::sqrt((sum_sq - replicates * mean_effect * mean_effect) /
                              (replicates - 1));
  const double mc_se = sd / std::sqrt(static_cast<double>(replicates));
  const double truth = trial::true_estimand(s, 3).effect;
  CHECK(std::fabs(mean_effect - truth) < 3.0 * mc_se);
}

TEST_CASE("zero withdrawal reproduces the full policy trajectory") {
  Scenario s = base_scenario();
  s.disc_rate_control = 0.5;
  s.disc_rate_active = 0.5;
  s.dgm.n_per_arm = 50;
  trial::TrialDataset dataset = trial::generate_trial(s, 0, 7);
  for (auto& subject : dataset.subjects) {
    subject.withdrawn = false;
    for (int j = 0; j < 4; ++j) subject.observed(j) = subject.policy_outcome(j);
  }
  for (const auto& subject : dataset.subjects) {
    for (int j = 0; j < 4; ++j) {
      CHECK(subject.observed(j) == subject.policy_outcome(j));
    }
  }
}

TEST_CASE("dataset export round-trips the key columns") {
  Scenario s = base_scenario();
  s.dgm.n_per_arm = 4;
  const trial::TrialDataset dataset = trial::generate_trial(s, 2, 11);
  std::ostringstream out;
  trial::write_dataset_csv(out, dataset);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "id,arm,y0,y1,y2,y3,disc_time,withdrawn,replicate,scenario_id");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.find(",2,1") != std::string::npos);  // replicate, scenario trailer
  }
  CHECK(rows == 8);
}

TEST_CASE("generation is reproducible") {
  Scenario s = base_scenario();
  s.dgm.n_per_arm = 20;
  const auto a = trial::generate_trial(s, 5, 42);
  const auto b = trial::generate_trial(s, 5, 42);
  const auto c = trial::generate_trial(s, 6, 42);
  REQUIRE(a.subjects.size() == b.subjects.size());
  bool all_equal = true;
  bool differs_from_c = false;
  for (std::size_t i = 0; i < a.subjects.size(); ++i) {
    all_equal = all_equal &&
                (a.subjects[i].y_on - b.subjects[i].y_on).cwiseAbs().maxCoeff() == 0.0 &&
                a.subjects[i].disc_time == b.subjects[i].disc_time &&
                a.subjects[i].withdrawn == b.subjects[i].withdrawn;
    differs_from_c =
        differs_from_c ||
        (a.subjects[i].y_on - c.subjects[i].y_on).cwiseAbs().maxCoeff() != 0.0;
  }
  CHECK(all_equal);
  CHECK(differs_from_c);
}
