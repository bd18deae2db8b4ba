#pragma once

#include "tpsim/analyze/estimates.hpp"
#include "tpsim/model/spec.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace tpsim::harness {

// Analysis methods compared on the grid: the full-data ANCOVA anchor, the
// available-data MMRM, and the eight sequential MI models.
enum class AnalysisModel {
  FULL,
  MMRM,
  CICS,
  OICS,
  PICS,
  OIOS,
  PIOS,
  PIPS,
  OICS_R,
  PICS_R
};

constexpr std::array<AnalysisModel, 10> kAllAnalysisModels{
    AnalysisModel::FULL, AnalysisModel::MMRM,   AnalysisModel::CICS,
    AnalysisModel::OICS, AnalysisModel::PICS,   AnalysisModel::OIOS,
    AnalysisModel::PIOS, AnalysisModel::PIPS,   AnalysisModel::OICS_R,
    AnalysisModel::PICS_R};

const char* to_string(AnalysisModel model);
AnalysisModel analysis_model_from_string(const std::string& text);
bool is_mi_model(AnalysisModel model);
model::ModelName mi_model_name(AnalysisModel model);

enum class Estimand { Effect, MeanControl, MeanActive };

const char* to_string(Estimand estimand);
Estimand estimand_from_string(const std::string& text);

struct MetricsRow {
  int scenario_id = 0;
  AnalysisModel model = AnalysisModel::FULL;
  Estimand estimand = Estimand::Effect;
  int n_sims = 0;
  double conv_rate = 0.0;
  double bias = 0.0;                      // mL, converged replicates only
  double mcse_bias = 0.0;                 // SD(estimates)/sqrt(n_converged)
  double mean_halfwidth = 0.0;            // mL
  double halfwidth_change_vs_full = 0.0;  // percent
  double coverage = 0.0;
  double mcse_coverage = 0.0;
};

struct CoverageResult {
  double fraction = 0.0;
  double mc_se = 0.0;  // sqrt(p(1-p)/n)
};

CoverageResult coverage(const std::vector<analyze::Interval>& intervals, double truth);

/// RFC-4180 CSV with '.' decimal separator; read_metrics_csv round-trips
/// write_metrics_csv exactly.
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_metrics_csv(std::istream& in);

}  // namespace tpsim::harness
