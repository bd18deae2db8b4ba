#pragma once

#include "tpsim/common.hpp"

#include <array>
#include <string>
#include <vector>

namespace tpsim::trial {

enum class Arm { Control, Active };

enum class Mechanism { DAR, DNAR1, DNAR2 };

enum class WithdrawalBalance { Balanced, MoreEarly, MoreLate };

enum class Trajectory { ReturnToBaseline, SameAsActive };

// Parameters of the outcome-generating model. Outcomes are handled in
// litres internally; reporting converts to mL.
struct DgmParams {
  Vector mu_control = default_mu();            // on-treatment control means, t0..t3
  Matrix sigma = default_sigma();              // on-treatment covariance, 4x4
  Vector delta = default_delta();              // active-vs-control shifts, t0..t3
  double theta_on = 0.3;                       // subject heterogeneity SD, on-treatment
  double theta_off = 0.3;                      // subject heterogeneity SD, off-treatment
  int n_per_arm = 375;

  static Vector default_mu();
  static Matrix default_sigma();
  static Vector default_delta();

  void validate() const;
};

// One cell of the simulation factorial.
struct Scenario {
  Mechanism mechanism = Mechanism::DAR;
  double disc_rate_control = 0.0;
  double disc_rate_active = 0.0;
  WithdrawalBalance balance = WithdrawalBalance::Balanced;
  Trajectory trajectory = Trajectory::ReturnToBaseline;
  DgmParams dgm;
  int id = 0;

  void validate() const;
  std::string label() const;
};

/// The full 72-cell grid: 2 trajectories x 3 mechanisms x 4 rate pairs x
/// 3 withdrawal balances. Ids run 1..72; within a trajectory the id is
/// mechanism-major, then rate pair, then balance, and the SameAsActive
/// block starts at 37.
std::vector<Scenario> scenario_grid(const DgmParams& dgm = {});

/// The 12-cell subset used by the desk profile.
std::vector<int> desk_scenario_ids();

const char* to_string(Arm arm);
const char* to_string(Mechanism mechanism);
const char* to_string(WithdrawalBalance balance);
const char* to_string(Trajectory trajectory);

Mechanism mechanism_from_string(const std::string& text);
WithdrawalBalance balance_from_string(const std::string& text);
Trajectory trajectory_from_string(const std::string& text);

/// Applies overrides from a JSON document whose fields mirror Scenario /
/// DgmParams (mechanism, disc_rate_control, disc_rate_active, balance,
/// trajectory, dgm.{mu_control, sigma, delta, theta_on, theta_off,
/// n_per_arm}). Unknown keys are rejected.
Scenario scenario_from_json(const std::string& json_text, Scenario base = {});

}  // namespace tpsim::trial
