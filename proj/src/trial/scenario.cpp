#include "tpsim/trial/scenario.hpp"

#include "tpsim/stat/linalg.hpp"

#include <json.hpp>

#include <sstream>

namespace tpsim::trial {

Vector DgmParams::default_mu() {
  Vector mu(4);
  mu << 2.14, 2.47, 2.52, 2.54;
  return mu;
}

Matrix DgmParams::default_sigma() {
  Matrix sigma(4, 4);
  sigma << 0.45, 0.46, 0.46, 0.47,
           0.46, 0.66, 0.62, 0.63,
           0.46, 0.62, 0.65, 0.63,
           0.47, 0.63, 0.63, 0.68;
  return sigma;
}

Vector DgmParams::default_delta() {
  Vector delta(4);
  delta << 0.0, 0.1, 0.1, 0.1;
  return delta;
}

void DgmParams::validate() const {
  if (mu_control.size() != 4 || delta.size() != 4) {
    throw Error("DgmParams: mu_control and delta must have 4 timepoints");
  }
  if (delta(0) != 0.0) {
    throw Error("DgmParams: no treatment effect at baseline (delta[0] must be 0)");
  }
  if (sigma.rows() != 4 || sigma.cols() != 4) {
    throw Error("DgmParams: sigma must be 4x4");
  }
  stat::cholesky(sigma);  // positive definite or throws
  if (theta_on < 0.0 || theta_off < 0.0) {
    throw Error("DgmParams: heterogeneity SDs must be nonnegative");
  }
  if (n_per_arm < 1) {
    throw Error("DgmParams: n_per_arm must be positive");
  }
}

void Scenario::validate() const {
  if (disc_rate_control < 0.0 || disc_rate_control > 1.0 ||
      disc_rate_active < 0.0 || disc_rate_active > 1.0) {
    throw Error("Scenario: discontinuation rates must lie in [0, 1]");
  }
  dgm.validate();
}

std::string Scenario::label() const {
  std::ostringstream out;
  out << to_string(trajectory) << "/" << to_string(mechanism) << "/"
      << static_cast<int>(disc_rate_control * 100 + 0.5) << "%:"
      << static_cast<int>(disc_rate_active * 100 + 0.5) << "%/"
      << to_string(balance);
  return out.str();
}

std::vector<Scenario> scenario_grid(const DgmParams& dgm) {
  const std::array<std::pair<double, double>, 4> rates{
      {{0.1, 0.1}, {0.1, 0.2}, {0.2, 0.2}, {0.5, 0.5}}};
  const std::array<Mechanism, 3> mechanisms{Mechanism::DAR, Mechanism::DNAR1,
                                            Mechanism::DNAR2};
  const std::array<WithdrawalBalance, 3> balances{WithdrawalBalance::Balanced,
                                                  WithdrawalBalance::MoreEarly,
                                                  WithdrawalBalance::MoreLate};
  const std::array<Trajectory, 2> trajectories{Trajectory::ReturnToBaseline,
                                               Trajectory::SameAsActive};
  std::vector<Scenario> grid;
  grid.reserve(72);
  int id = 1;
  for (Trajectory trajectory : trajectories) {
    for (Mechanism mechanism : mechanisms) {
      for (const auto& [rate_c, rate_a] : rates) {
        for (WithdrawalBalance balance : balances) {
          Scenario s;
          s.mechanism = mechanism;
          s.disc_rate_control = rate_c;
          s.disc_rate_active = rate_a;
          s.balance = balance;
          s.trajectory = trajectory;
          s.dgm = dgm;
          s.id = id++;
          grid.push_back(std::move(s));
        }
      }
    }
  }
  return grid;
}

std::vector<int> desk_scenario_ids() {
  // Spread across mechanisms, rates and balances; includes the cells the
  // acceptance suite interrogates directly (18, 30, 54, 71 among them).
  return {1, 10, 17, 18, 19, 30, 37, 47, 54, 65, 66, 71};
}

const char* to_string(Arm arm) {
  return arm == Arm::Control ? "Control" : "Active";
}

const char* to_string(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::DAR: return "DAR";
    case Mechanism::DNAR1: return "DNAR1";
    case Mechanism::DNAR2: return "DNAR2";
  }
  return "?";
}

const char* to_string(WithdrawalBalance balance) {
  switch (balance) {
    case WithdrawalBalance::Balanced: return "Balanced";
    case WithdrawalBalance::MoreEarly: return "MoreEarly";
    case WithdrawalBalance::MoreLate: return "MoreLate";
  }
  return "?";
}

const char* to_string(Trajectory trajectory) {
  return trajectory == Trajectory::ReturnToBaseline ? "ReturnToBaseline"
                                                    : "SameAsActive";
}

Mechanism mechanism_from_string(const std::string& text) {
  if (text == "DAR") return Mechanism::DAR;
  if (text == "DNAR1") return Mechanism::DNAR1;
  if (text == "DNAR2") return Mechanism::DNAR2;
  throw Error("unknown mechanism: " + text);
}

WithdrawalBalance balance_from_string(const std::string& text) {
  if (text == "Balanced") return WithdrawalBalance::Balanced;
  if (text == "MoreEarly") return WithdrawalBalance::MoreEarly;
  if (text == "MoreLate") return WithdrawalBalance::MoreLate;
  throw Error("unknown withdrawal balance: " + text);
}

Trajectory trajectory_from_string(const std::string& text) {
  if (text == "ReturnToBaseline") return Trajectory::ReturnToBaseline;
  if (text == "SameAsActive") return Trajectory::SameAsActive;
  throw Error("unknown trajectory: " + text);
}

namespace {

Vector vector_from_json(const nlohmann::json& node, Index expected,
                        const std::string& key) {
  if (!node.is_array() || static_cast<Index>(node.size()) != expected) {
    throw Error("scenario json: " + key + " must be an array of length " +
                std::to_string(expected));
  }
  Vector out(expected);
  for (Index i = 0; i < expected; ++i) out(i) = node[static_cast<std::size_t>(i)].get<double>();
  return out;
}

}  // namespace

Scenario scenario_from_json(const std::string& json_text, Scenario base) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("scenario json: ") + e.what());
  }
  if (!doc.is_object()) throw Error("scenario json: top level must be an object");

  for (const auto& [key, value] : doc.items()) {
    if (key == "mechanism") {
      base.mechanism = mechanism_from_string(value.get<std::string>());
    } else if (key == "disc_rate_control") {
      base.disc_rate_control = value.get<double>();
    } else if (key == "disc_rate_active") {
      base.disc_rate_active = value.get<double>();
    } else if (key == "withdrawal_balance" || key == "balance") {
      base.balance = balance_from_string(value.get<std::string>());
    } else if (key == "trajectory") {
      base.trajectory = trajectory_from_string(value.get<std::string>());
    } else if (key == "id") {
      base.id = value.get<int>();
    } else if (key == "dgm") {
      if (!value.is_object()) throw Error("scenario json: dgm must be an object");
      for (const auto& [dkey, dval] : value.items()) {
        if (dkey == "mu_control") {
          base.dgm.mu_control = vector_from_json(dval, 4, dkey);
        } else if (dkey == "delta") {
          base.dgm.delta = vector_from_json(dval, 4, dkey);
        } else if (dkey == "sigma") {
          if (!dval.is_array() || dval.size() != 4) {
            throw Error("scenario json: sigma must be a 4x4 array of arrays");
          }
          Matrix sigma(4, 4);
          for (std::size_t r = 0; r < 4; ++r) {
            Vector row = vector_from_json(dval[r], 4, "sigma row");
            sigma.row(static_cast<Index>(r)) = row.transpose();
          }
          base.dgm.sigma = sigma;
        } else if (dkey == "theta_on") {
          base.dgm.theta_on = dval.get<double>();
        } else if (dkey == "theta_off") {
          base.dgm.theta_off = dval.get<double>();
        } else if (dkey == "n_per_arm") {
          base.dgm.n_per_arm = dval.get<int>();
        } else {
          throw Error("scenario json: unknown dgm key '" + dkey + "'");
        }
      }
    } else {
      throw Error("scenario json: unknown key '" + key + "'");
    }
  }
  base.validate();
  return base;
}

}  // namespace tpsim::trial
