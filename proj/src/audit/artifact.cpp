#include <algorithm>
#include <cmath>
#include <fstream>

#include "affect/audit.hpp"

namespace affect::audit {

namespace {

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ExportError("cannot write " + path.string());
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

unsigned char gray(double v) {
  return static_cast<unsigned char>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
}

}  // namespace

RuleConditionMatrix rule_condition_matrix(const Json& fusion_fuzzy) {
  RuleConditionMatrix m;
  const auto& fired = fusion_fuzzy.at("fired_rules");
  const Json memberships = fusion_fuzzy.value("memberships", Json::object());

  for (const auto& rule : fired) {
    for (const auto& cond : rule.at("if")) {
      const auto text = cond.get<std::string>();
      if (std::find(m.conditions.begin(), m.conditions.end(), text) == m.conditions.end()) m.conditions.push_back(text);
    }
  }

  std::size_t index = 0;
  for (const auto& rule : fired) {
    ++index;
    std::string label = "R" + std::to_string(index) + ": ";
    std::vector<std::optional<double>> row(m.conditions.size());
    bool first = true;
    for (const auto& cond : rule.at("if")) {
      const auto text = cond.get<std::string>();
      label += (first ? "" : " AND ") + text;
      first = false;
      const auto col = static_cast<std::size_t>(
          std::find(m.conditions.begin(), m.conditions.end(), text) - m.conditions.begin());
      const auto pos = text.find(" is ");
      const auto var = text.substr(0, pos);
      const auto set = pos == std::string::npos ? std::string{} : text.substr(pos + 4);
      double degree = 0.0;
      if (memberships.contains(var) && memberships.at(var).contains(set)) degree = memberships.at(var).at(set).get<double>();
      row[col] = degree;
    }
    label += " -> " + rule.at("then").get<std::string>();
    m.rules.push_back(std::move(label));
    m.cells.push_back(std::move(row));
    m.strengths.push_back(rule.at("strength").get<double>());
  }
  return m;
}

std::string render_matrix_csv(const RuleConditionMatrix& m) {
  std::string out = "rule";
  for (const auto& c : m.conditions) out += "," + csv_field(c);
  out += ",strength\n";
  for (std::size_t r = 0; r < m.rules.size(); ++r) {
    out += csv_field(m.rules[r]);
    for (const auto& cell : m.cells[r]) {
      out.push_back(',');
      if (cell) out += format_real(*cell);
    }
    out += "," + format_real(m.strengths[r]) + "\n";
  }
  return out;
}

std::string render_heatmap_ppm(const RuleConditionMatrix& m) {
  const std::size_t cols = m.conditions.size() + 1;
  const std::size_t rows = std::max<std::size_t>(1, m.rules.size());
  const std::size_t width = cols * kHeatmapCellPixels;
  const std::size_t height = rows * kHeatmapCellPixels;
  std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  const std::size_t header = out.size();
  out.resize(header + width * height * 3, '\0');
  for (std::size_t r = 0; r < m.rules.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double value = c + 1 == cols ? m.strengths[r] : m.cells[r][c].value_or(0.0);
      const unsigned char g = gray(value);
      for (int py = 0; py < kHeatmapCellPixels; ++py) {
        const std::size_t y = r * kHeatmapCellPixels + static_cast<std::size_t>(py);
        for (int px = 0; px < kHeatmapCellPixels; ++px) {
          const std::size_t x = c * kHeatmapCellPixels + static_cast<std::size_t>(px);
          const std::size_t at = header + (y * width + x) * 3;
          out[at] = out[at + 1] = out[at + 2] = static_cast<char>(g);
        }
      }
    }
  }
  return out;
}

ArtifactPaths export_explainability_artifact(const Json& event, const std::string& txid,
                                             const std::filesystem::path& dir) {
  if (event.value("mode", std::string{}) != "fuzzy" || !event.contains("fusion_fuzzy")) {
    throw ExportError("explainability artifacts require a fuzzy-mode event");
  }
  const auto& fz = event.at("fusion_fuzzy");
  Json artifact = {
      {"txid", txid},
      {"fired_rules", fz.at("fired_rules")},
      {"inputs", fz.at("inputs")},
      {"out_sets", fz.at("out_sets")},
  };

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ExportError("cannot create " + dir.string() + ": " + ec.message());

  const auto matrix = rule_condition_matrix(fz);
  ArtifactPaths paths{dir / (txid + ".json"), dir / (txid + ".csv"), dir / (txid + ".ppm")};
  write_file(paths.json, canonicalize(artifact));
  write_file(paths.csv, render_matrix_csv(matrix));
  write_file(paths.ppm, render_heatmap_ppm(matrix));
  return paths;
}

}  // namespace affect::audit
