#include "tpsim/harness/report.hpp"
#include "tpsim/harness/runner.hpp"
#include "tpsim/harness/theory.hpp"
#include "tpsim/mi/engine.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tpsim::IoError("cannot read", path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<tpsim::trial::Scenario> resolve_scenarios(
    const std::vector<int>& ids, const std::string& json_path) {
  std::vector<tpsim::trial::Scenario> scenarios;
  if (!json_path.empty()) {
    tpsim::trial::Scenario base;
    base.id = 999;
    scenarios.push_back(tpsim::trial::scenario_from_json(read_file(json_path), base));
    return scenarios;
  }
  const std::vector<tpsim::trial::Scenario> grid = tpsim::trial::scenario_grid();
  for (int id : ids) {
    if (id < 1 || id > 72) {
      throw tpsim::Error("scenario id out of range 1..72: " + std::to_string(id));
    }
    scenarios.push_back(grid[static_cast<std::size_t>(id - 1)]);
  }
  return scenarios;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and estimation toolkit for treatment-policy estimands "
               "in longitudinal trials with treatment discontinuation"};
  app.require_subcommand(1);

  // --- simulate ---------------------------------------------------------
  auto* simulate = app.add_subcommand(
      "simulate", "Generate trial datasets (CSV, one row per subject)");
  int sim_scenario = 1;
  int sim_replicates = 1;
  std::uint64_t sim_seed = tpsim::harness::kDefaultSeed;
  std::string sim_out, sim_json, sim_model;
  int sim_imputations = 25;
  simulate->add_option("--scenario", sim_scenario, "Scenario id (1..72)");
  simulate->add_option("--scenario-json", sim_json,
                       "JSON file overriding scenario/DGM fields");
  simulate->add_option("--replicates", sim_replicates, "Number of replicates");
  simulate->add_option("--seed", sim_seed, "Master seed");
  simulate->add_option("--out", sim_out, "Output CSV path (default stdout)");
  simulate->add_option("--model", sim_model,
                       "Also impute with this model and dump the completed copies");
  simulate->add_option("--imputations", sim_imputations,
                       "Copies for --model dumps");

  // --- run --------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Run the simulation grid and write metrics");
  std::string run_profile = "desk";
  std::vector<int> run_scenarios;
  int run_sims = 0;
  std::vector<std::string> run_models;
  int run_imputations = 0;
  std::uint64_t run_seed = tpsim::harness::kDefaultSeed;
  int run_threads = 0;
  std::string run_out = "out";
  std::string run_json;
  run->add_option("--profile", run_profile, "desk (12 cells x 250 sims) or full (72 x 1000)")
      ->check(CLI::IsMember({"desk", "full"}));
  run->add_option("--scenarios", run_scenarios, "Scenario ids (1..72), overrides profile");
  run->add_option("--scenario-json", run_json, "Single custom scenario JSON file");
  run->add_option("--sims", run_sims, "Replicates per scenario");
  run->add_option("--models", run_models,
                  "Model subset (FULL MMRM CICS OICS PICS OIOS PIOS PIPS OICS-R PICS-R)");
  run->add_option("--imputations", run_imputations, "Imputation copies");
  run->add_option("--seed", run_seed, "Master seed");
  run->add_option("--threads", run_threads, "Worker threads (0 = hardware)");
  run->add_option("--out", run_out, "Output directory");

  // --- report -----------------------------------------------------------
  auto* report_cmd = app.add_subcommand("report", "Re-render reports from metrics.csv");
  std::string report_metrics, report_out = "out";
  report_cmd->add_option("--metrics", report_metrics, "metrics.csv path")->required();
  report_cmd->add_option("--out", report_out, "Output directory");

  // --- theory -----------------------------------------------------------
  auto* theory = app.add_subcommand("theory", "Closed-form bias / variance-inflation calculators");
  theory->require_subcommand(1);
  auto* theory_bias_cmd = theory->add_subcommand("bias", "Group-mean bias under pooled-history imputation");
  double tb_n1 = 0, tb_n2 = 0, tb_mu1 = 0, tb_mu2 = 0;
  theory_bias_cmd->add_option("--n1", tb_n1, "Completers on treatment")->required();
  theory_bias_cmd->add_option("--n2", tb_n2, "Observed off-treatment completers")->required();
  theory_bias_cmd->add_option("--mu1", tb_mu1, "On-treatment mean change (mL)")->required();
  theory_bias_cmd->add_option("--mu2", tb_mu2, "Off-treatment mean change (mL)")->required();
  auto* theory_infl_cmd = theory->add_subcommand("inflation", "Variance inflation from missing off-treatment data");
  double ti_n1 = 0, ti_n2 = 0, ti_n3 = 0;
  theory_infl_cmd->add_option("--n1", ti_n1, "Completers on treatment")->required();
  theory_infl_cmd->add_option("--n2", ti_n2, "Observed off-treatment completers")->required();
  theory_infl_cmd->add_option("--n3", ti_n3, "Withdrawn (missing) subjects")->required();
  auto* theory_table_cmd = theory->add_subcommand(
      "table", "Variance inflation at the standard discontinuation settings");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*simulate) {
      std::vector<int> ids{sim_scenario};
      const std::vector<tpsim::trial::Scenario> scenarios =
          resolve_scenarios(ids, sim_json);
      std::ofstream file;
      std::ostream* out = &std::cout;
      if (!sim_out.empty()) {
        file.open(sim_out);
        if (!file) throw tpsim::IoError("cannot write", sim_out);
        out = &file;
      }
      for (int r = 0; r < sim_replicates; ++r) {
        const tpsim::trial::TrialDataset dataset =
            tpsim::trial::generate_trial(scenarios.front(), r, sim_seed);
        if (sim_model.empty()) {
          tpsim::trial::write_dataset_csv(*out, dataset, r == 0);
        } else {
          tpsim::mi::ImputationConfig cfg;
          cfg.m = sim_imputations;
          cfg.seed = sim_seed;
          const tpsim::mi::CompletedData completed = tpsim::mi::impute(
              dataset,
              tpsim::model::builtin_spec(tpsim::model::model_name_from_string(sim_model)),
              cfg);
          tpsim::mi::write_completed_csv(*out, dataset, completed);
          if (!completed.all_ok()) {
            std::cerr << "warning: " << completed.first_failure() << "\n";
          }
        }
      }
      if (!sim_out.empty() && !file) throw tpsim::IoError("write failed", sim_out);
      return kExitOk;
    }

    if (*run) {
      tpsim::harness::RunConfig cfg =
          run_profile == "full" ? tpsim::harness::full_profile()
                                : tpsim::harness::desk_profile();
      if (!run_scenarios.empty() || !run_json.empty()) {
        cfg.scenarios = resolve_scenarios(run_scenarios, run_json);
      }
      if (run_sims > 0) cfg.n_sims = run_sims;
      if (!run_models.empty()) {
        cfg.models.clear();
        for (const std::string& name : run_models) {
          cfg.models.push_back(tpsim::harness::analysis_model_from_string(name));
        }
      }
      if (run_imputations > 0) cfg.imputations = run_imputations;
      cfg.seed = run_seed;
      cfg.threads = run_threads;
      cfg.validate();

      const std::vector<tpsim::harness::MetricsRow> rows = tpsim::harness::run_grid(cfg);
      const std::vector<std::string> files = tpsim::harness::report(rows, run_out);
      std::cout << rows.size() << " metric rows\n";
      for (const std::string& path : files) std::cout << "wrote " << path << "\n";
      return kExitOk;
    }

    if (*report_cmd) {
      std::ifstream in(report_metrics);
      if (!in) throw tpsim::IoError("cannot read", report_metrics);
      const std::vector<tpsim::harness::MetricsRow> rows =
          tpsim::harness::read_metrics_csv(in);
      const std::vector<std::string> files = tpsim::harness::report(rows, report_out);
      for (const std::string& path : files) std::cout << "wrote " << path << "\n";
      return kExitOk;
    }

    if (*theory) {
      std::cout.setf(std::ios::fixed);
      std::cout.precision(4);
      if (*theory_bias_cmd) {
        std::cout << tpsim::harness::theory_bias(tb_n1, tb_n2, tb_mu1, tb_mu2)
                  << " mL\n";
      } else if (*theory_infl_cmd) {
        std::cout << tpsim::harness::theory_var_inflation(ti_n1, ti_n2, ti_n3) << "\n";
      } else if (*theory_table_cmd) {
        const std::array<std::pair<double, double>, 4> arm_rates{
            {{0.10, 0.10}, {0.10, 0.20}, {0.20, 0.20}, {0.50, 0.50}}};
        std::cout << "control  active  group_c  group_a  effect\n";
        for (const auto& [rc, ra] : arm_rates) {
          const double gc =
              tpsim::harness::theory_var_inflation(1.0 - rc, rc / 2.0, rc / 2.0);
          const double ga =
              tpsim::harness::theory_var_inflation(1.0 - ra, ra / 2.0, ra / 2.0);
          std::cout << rc << "   " << ra << "    " << gc << "   " << ga << "   "
                    << tpsim::harness::theory_effect_inflation(gc, ga) << "\n";
        }
      }
      return kExitOk;
    }
  } catch (const tpsim::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const tpsim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
