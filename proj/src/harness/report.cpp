#include "tpsim/harness/report.hpp"

#include "tpsim/trial/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace tpsim::harness {

namespace {

struct Shade {
  int r, g, b;
};

std::string to_hex(const Shade& shade) {
  char buffer[8];
  std::snprintf(buffer, sizeof(buffer), "#%02x%02x%02x", shade.r, shade.g, shade.b);
  return buffer;
}

Shade blend(const Shade& from, const Shade& to, double t) {
  t = std::clamp(t, 0.0, 1.0);
  return {static_cast<int>(from.r + t * (to.r - from.r)),
          static_cast<int>(from.g + t * (to.g - from.g)),
          static_cast<int>(from.b + t * (to.b - from.b))};
}

const Shade kWhite{255, 255, 255};
const Shade kRed{202, 53, 66};
const Shade kBlue{56, 102, 188};
const Shade kOrange{224, 130, 52};
const Shade kGray{204, 204, 204};

std::string bias_color(double value) {
  if (!std::isfinite(value)) return to_hex(kGray);
  const double t = std::fabs(value) / 30.0;
  return to_hex(blend(kWhite, value >= 0.0 ? kRed : kBlue, t));
}

std::string halfwidth_color(double value) {
  if (!std::isfinite(value)) return to_hex(kGray);
  return to_hex(blend(kWhite, kOrange, value / 50.0));
}

std::string coverage_color(double value) {
  if (!std::isfinite(value)) return to_hex(kGray);
  const double deviation = (0.95 - value) / 0.10;
  return to_hex(blend(kWhite, deviation >= 0.0 ? kRed : kBlue, std::fabs(deviation)));
}

std::string format_value(double value, int decimals) {
  if (!std::isfinite(value)) return "-";
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(decimals);
  out << value;
  return out.str();
}

std::string scenario_row_label(int id) {
  if (id >= 1 && id <= 72) {
    static const std::vector<trial::Scenario> grid = trial::scenario_grid();
    const trial::Scenario& s = grid[static_cast<std::size_t>(id - 1)];
    std::ostringstream out;
    out << id << "  " << trial::to_string(s.mechanism) << " "
        << static_cast<int>(s.disc_rate_control * 100 + 0.5) << "/"
        << static_cast<int>(s.disc_rate_active * 100 + 0.5) << " "
        << trial::to_string(s.balance);
    return out.str();
  }
  return "scenario " + std::to_string(id);
}

struct Panel {
  std::string title;
  double MetricsRow::* field;
  std::string (*color)(double);
  int decimals;
};

void write_heatmap(const std::string& path, const std::string& title,
                   const std::vector<int>& scenario_ids,
                   const std::vector<AnalysisModel>& models,
                   const std::map<std::pair<int, AnalysisModel>, MetricsRow>& cells) {
  const std::array<Panel, 3> panels{
      Panel{"Bias (mL)", &MetricsRow::bias, bias_color, 1},
      Panel{"Halfwidth change vs FULL (%)", &MetricsRow::halfwidth_change_vs_full,
            halfwidth_color, 1},
      Panel{"95% CI coverage", &MetricsRow::coverage, coverage_color, 3}};

  const int cell_w = 62, cell_h = 20;
  const int label_w = 220, header_h = 46, panel_gap = 26, margin = 12;
  const int grid_w = cell_w * static_cast<int>(models.size());
  const int panel_h = header_h + cell_h * static_cast<int>(scenario_ids.size());
  const int width = margin * 2 + label_w + grid_w;
  const int height =
      margin * 2 + 24 + static_cast<int>(panels.size()) * (panel_h + panel_gap);

  std::ofstream out(path);
  if (!out) throw IoError("report: cannot write", path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" font-family=\"Helvetica, Arial, sans-serif\">\n";
  out << "<text x=\"" << margin << "\" y=\"" << margin + 12
      << "\" font-size=\"15\" font-weight=\"bold\">" << title << "</text>\n";

  int y0 = margin + 24;
  for (const Panel& panel : panels) {
    out << "<text x=\"" << margin << "\" y=\"" << y0 + 14
        << "\" font-size=\"12\" font-weight=\"bold\">" << panel.title << "</text>\n";
    for (std::size_t m = 0; m < models.size(); ++m) {
      out << "<text x=\"" << margin + label_w + static_cast<int>(m) * cell_w + cell_w / 2
          << "\" y=\"" << y0 + header_h - 6
          << "\" font-size=\"10\" text-anchor=\"middle\">" << to_string(models[m])
          << "</text>\n";
    }
    for (std::size_t s = 0; s < scenario_ids.size(); ++s) {
      const int y = y0 + header_h + static_cast<int>(s) * cell_h;
      out << "<text x=\"" << margin + label_w - 6 << "\" y=\"" << y + cell_h - 6
          << "\" font-size=\"9\" text-anchor=\"end\">"
          << scenario_row_label(scenario_ids[s]) << "</text>\n";
      for (std::size_t m = 0; m < models.size(); ++m) {
        const int x = margin + label_w + static_cast<int>(m) * cell_w;
        const auto it = cells.find({scenario_ids[s], models[m]});
        const double value =
            it == cells.end() ? std::nan("") : it->second.*(panel.field);
        out << "<rect class=\"cell\" x=\"" << x << "\" y=\"" << y << "\" width=\""
            << cell_w << "\" height=\"" << cell_h << "\" fill=\"" << panel.color(value)
            << "\" stroke=\"#888888\" stroke-width=\"0.5\"/>\n";
        out << "<text x=\"" << x + cell_w / 2 << "\" y=\"" << y + cell_h - 6
            << "\" font-size=\"9\" text-anchor=\"middle\">"
            << format_value(value, panel.decimals) << "</text>\n";
      }
    }
    y0 += panel_h + panel_gap;
  }
  out << "</svg>\n";
  if (!out) throw IoError("report: write failed", path);
}

}  // namespace

std::vector<std::string> report(const std::vector<MetricsRow>& rows,
                                const std::string& out_dir) {
  if (rows.empty()) throw EmptyReport("report: no metrics rows");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("report: cannot create directory", out_dir);

  std::vector<std::string> written;
  const std::string csv_path = out_dir + "/metrics.csv";
  {
    std::ofstream out(csv_path);
    if (!out) throw IoError("report: cannot write", csv_path);
    write_metrics_csv(out, rows);
    if (!out) throw IoError("report: write failed", csv_path);
  }
  written.push_back(csv_path);

  // One heatmap per trajectory present (effect rows drive the panels).
  struct Group {
    std::string file;
    std::string title;
    std::vector<int> scenario_ids;
    std::vector<AnalysisModel> models;
    std::map<std::pair<int, AnalysisModel>, MetricsRow> cells;
  };
  std::map<std::string, Group> groups;
  std::set<int> seen_scenarios;
  for (const MetricsRow& row : rows) {
    if (row.estimand != Estimand::Effect) continue;
    std::string key, title;
    if (row.scenario_id >= 1 && row.scenario_id <= 36) {
      key = "heatmap_return_to_baseline.svg";
      title = "Treatment effects - Return to Baseline";
    } else if (row.scenario_id >= 37 && row.scenario_id <= 72) {
      key = "heatmap_same_as_active.svg";
      title = "Treatment effects - Same as Active";
    } else {
      key = "heatmap_custom.svg";
      title = "Treatment effects - custom scenarios";
    }
    Group& group = groups[key];
    group.file = key;
    group.title = title;
    if (std::find(group.scenario_ids.begin(), group.scenario_ids.end(),
                  row.scenario_id) == group.scenario_ids.end()) {
      group.scenario_ids.push_back(row.scenario_id);
    }
    if (std::find(group.models.begin(), group.models.end(), row.model) ==
        group.models.end()) {
      group.models.push_back(row.model);
    }
    group.cells[{row.scenario_id, row.model}] = row;
  }

  for (auto& [key, group] : groups) {
    std::sort(group.scenario_ids.begin(), group.scenario_ids.end());
    std::sort(group.models.begin(), group.models.end(),
              [](AnalysisModel a, AnalysisModel b) {
                return static_cast<int>(a) < static_cast<int>(b);
              });
    const std::string path = out_dir + "/" + group.file;
    write_heatmap(path, group.title, group.scenario_ids, group.models, group.cells);
    written.push_back(path);
  }
  return written;
}

}  // namespace tpsim::harness
