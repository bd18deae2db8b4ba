#include "tpsim/harness/metrics.hpp"

#include "tpsim/common.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace tpsim::harness {

const char* to_string(AnalysisModel model) {
  switch (model) {
    case AnalysisModel::FULL: return "FULL";
    case AnalysisModel::MMRM: return "MMRM";
    case AnalysisModel::CICS: return "CICS";
    case AnalysisModel::OICS: return "OICS";
    case AnalysisModel::PICS: return "PICS";
    case AnalysisModel::OIOS: return "OIOS";
    case AnalysisModel::PIOS: return "PIOS";
    case AnalysisModel::PIPS: return "PIPS";
    case AnalysisModel::OICS_R: return "OICS-R";
    case AnalysisModel::PICS_R: return "PICS-R";
  }
  return "?";
}

AnalysisModel analysis_model_from_string(const std::string& text) {
  for (AnalysisModel model : kAllAnalysisModels) {
    if (text == to_string(model)) return model;
  }
  if (text == "OICS_R") return AnalysisModel::OICS_R;
  if (text == "PICS_R") return AnalysisModel::PICS_R;
  throw Error("unknown analysis model: " + text);
}

bool is_mi_model(AnalysisModel model) {
  return model != AnalysisModel::FULL && model != AnalysisModel::MMRM;
}

model::ModelName mi_model_name(AnalysisModel model) {
  switch (model) {
    case AnalysisModel::CICS: return model::ModelName::CICS;
    case AnalysisModel::OICS: return model::ModelName::OICS;
    case AnalysisModel::PICS: return model::ModelName::PICS;
    case AnalysisModel::OIOS: return model::ModelName::OIOS;
    case AnalysisModel::PIOS: return model::ModelName::PIOS;
    case AnalysisModel::PIPS: return model::ModelName::PIPS;
    case AnalysisModel::OICS_R: return model::ModelName::OICS_R;
    case AnalysisModel::PICS_R: return model::ModelName::PICS_R;
    default: throw Error("not an MI model: " + std::string(to_string(model)));
  }
}

const char* to_string(Estimand estimand) {
  switch (estimand) {
    case Estimand::Effect: return "effect";
    case Estimand::MeanControl: return "mean_control";
    case Estimand::MeanActive: return "mean_active";
  }
  return "?";
}

Estimand estimand_from_string(const std::string& text) {
  if (text == "effect") return Estimand::Effect;
  if (text == "mean_control") return Estimand::MeanControl;
  if (text == "mean_active") return Estimand::MeanActive;
  throw Error("unknown estimand: " + text);
}

CoverageResult coverage(const std::vector<analyze::Interval>& intervals, double truth) {
  if (intervals.empty()) {
    throw Error("coverage: needs at least one interval");
  }
  std::size_t covered = 0;
  for (const analyze::Interval& ci : intervals) {
    if (ci.low <= truth && truth <= ci.high) ++covered;
  }
  CoverageResult result;
  const double n = static_cast<double>(intervals.size());
  result.fraction = static_cast<double>(covered) / n;
  result.mc_se = std::sqrt(result.fraction * (1.0 - result.fraction) / n);
  return result;
}

namespace {

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string format_double(double value) {
  std::ostringstream out;
  out.precision(std::numeric_limits<double>::max_digits10);
  out << value;
  return out.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

constexpr const char* kHeader =
    "scenario_id,model,estimand,n_sims,conv_rate,bias,mcse_bias,mean_halfwidth,"
    "halfwidth_change_vs_full,coverage,mcse_coverage";

}  // namespace

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << kHeader << '\n';
  for (const MetricsRow& row : rows) {
    out << row.scenario_id << ',' << csv_quote(to_string(row.model)) << ','
        << csv_quote(to_string(row.estimand)) << ',' << row.n_sims << ','
        << format_double(row.conv_rate) << ',' << format_double(row.bias) << ','
        << format_double(row.mcse_bias) << ',' << format_double(row.mean_halfwidth)
        << ',' << format_double(row.halfwidth_change_vs_full) << ','
        << format_double(row.coverage) << ',' << format_double(row.mcse_coverage)
        << '\n';
  }
}

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error("metrics csv: empty file");
  }
  if (line != kHeader) {
    throw Error("metrics csv: unexpected header: " + line);
  }
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 11) {
      throw Error("metrics csv: expected 11 fields, got " +
                  std::to_string(fields.size()));
    }
    MetricsRow row;
    row.scenario_id = std::stoi(fields[0]);
    row.model = analysis_model_from_string(fields[1]);
    row.estimand = estimand_from_string(fields[2]);
    row.n_sims = std::stoi(fields[3]);
    row.conv_rate = std::stod(fields[4]);
    row.bias = std::stod(fields[5]);
    row.mcse_bias = std::stod(fields[6]);
    row.mean_halfwidth = std::stod(fields[7]);
    row.halfwidth_change_vs_full = std::stod(fields[8]);
    row.coverage = std::stod(fields[9]);
    row.mcse_coverage = std::stod(fields[10]);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tpsim::harness
