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
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "cstirap/ensemble.hpp"

namespace cstirap {

/// Header row of efficiency-map CSV files.
inline constexpr const char* kMapCsvHeader = "tau_s, omega_scale, efficiency";

/// Shortest decimal text that parses back to exactly `v`; "nan"/"inf" for
/// non-finite values.
std::string format_double(double v);

/// One row per (delay, scale) point in map order. Missing values are "nan".
void write_map_csv(std::ostream& out, const EfficiencyMap& map);

/// {"tau_s": [...], "omega_scale": [...], "efficiency": [[...] per delay],
///  "diagnostics": [...], "config": metadata}. Missing values are null.
nlohmann::json map_to_json(const EfficiencyMap& map);

EfficiencyMap map_from_json(const nlohmann::json& j);

/// Writes `text` to `path`, creating parent directories. Throws
/// std::runtime_error on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace cstirap
