// Copyright 2026 The cstirap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "cstirap/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cstirap {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_map_csv(std::ostream& out, const EfficiencyMap& map) {
  out << kMapCsvHeader << '\n';
  for (std::size_t i = 0; i < map.delays.size(); ++i) {
    for (std::size_t j = 0; j < map.scales.size(); ++j) {
      const std::optional<double> eta = map.at(i, j);
      out << format_double(map.delays[i]) << ", " << format_double(map.scales[j]) << ", "
          << (eta ? format_double(*eta) : "nan") << '\n';
    }
  }
}

nlohmann::json map_to_json(const EfficiencyMap& map) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < map.delays.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < map.scales.size(); ++j) {
      const std::optional<double> eta = map.at(i, j);
      row.push_back(eta ? nlohmann::json(*eta) : nlohmann::json(nullptr));
    }
    rows.push_back(std::move(row));
  }
  return nlohmann::json{{"tau_s", map.delays},
                        {"omega_scale", map.scales},
                        {"efficiency", std::move(rows)},
                        {"diagnostics", map.diagnostics},
                        {"config", map.metadata}};
}

EfficiencyMap map_from_json(const nlohmann::json& j) {
  EfficiencyMap map;
  map.delays = j.at("tau_s").get<std::vector<double>>();
  map.scales = j.at("omega_scale").get<std::vector<double>>();
  const nlohmann::json& rows = j.at("efficiency");
  if (!rows.is_array() || rows.size() != map.delays.size()) {
    throw std::invalid_argument("efficiency map JSON: row count does not match tau_s");
  }
  for (const nlohmann::json& row : rows) {
    if (!row.is_array() || row.size() != map.scales.size()) {
      throw std::invalid_argument("efficiency map JSON: column count does not match omega_scale");
    }
    for (const nlohmann::json& v : row) {
      map.efficiency.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
    }
  }
  if (j.contains("diagnostics")) map.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
  if (j.contains("config")) map.metadata = j.at("config");
  return map;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace cstirap
