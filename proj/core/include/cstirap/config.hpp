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
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cstirap/ensemble.hpp"
#include "cstirap/pulses.hpp"

namespace cstirap {

/// Invalid or unreadable run configuration. `key()` names the offending key
/// when there is one.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::string key = {})
      : std::runtime_error(message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Flat run description. Frequencies are ordinary frequencies (the *_hz keys
/// hold Omega / 2 pi), times are in seconds.
struct RunConfig {
  std::string name = "run";

  double rabi_pump_hz = 0.0;
  double rabi_stokes_hz = 0.0;
  double detuning_stokes_hz = 0.0;
  double two_photon_detuning_hz = 0.0;
  bool decay_enabled = false;
  double t1_optical_s = 164e-6;
  double t2_hyperfine_s = 500e-6;
  double oscillator_strength_ratio = 1.0;

  Family family = Family::Single;
  int n_pairs = 1;
  double delay_s = 0.0;
  double fwhm_s = 17e-6;
  Ordering first_ordering = Ordering::SP;
  RepeatStyle repeat_style = RepeatStyle::Alternating;
  bool r5_literal_stokes_scale = false;
  double truncation_fwhms = 1.5;

  bool ensemble_enabled = false;
  double optical_fwhm_hz = 200e3;
  double hyperfine_fwhm_hz = 30e3;
  double optical_range_hz = 300e3;
  double optical_step_hz = 20e3;
  double hyperfine_range_hz = 60e3;
  double hyperfine_step_hz = 4e3;

  bool spatial_enabled = false;
  int spatial_points = 7;
  double spatial_fwhm_fraction = 0.15;

  /// Empty means a single point at delay_s.
  std::vector<double> sweep_delays_s;
  std::vector<double> sweep_rabi_scales{1.0};

  double steps_per_fwhm = 2000.0;

  /// Throws ConfigError on out-of-range values.
  void validate() const;

  LambdaSystem system() const;
  SequenceSpec sequence() const;  // peaks taken from system()
  EnsembleSpec ensemble() const;
  SpatialAveragingSpec spatial() const;
  SimulationSettings settings(unsigned threads = 1) const;
  SweepSpec sweep_spec(unsigned threads = 1) const;
};

/// Every key of the JSON form, in output order.
const std::vector<std::string>& config_keys();

nlohmann::json to_json(const RunConfig& config);

/// Missing keys keep their defaults; unknown keys and wrong types throw
/// ConfigError naming the key. The result is validated.
RunConfig config_from_json(const nlohmann::json& j);

RunConfig load_config(const std::filesystem::path& path);

/// Named set of runs, one per curve.
struct Preset {
  std::string name;
  std::string description;
  std::vector<RunConfig> runs;
};

const std::vector<std::string>& preset_names();

/// Throws ConfigError for an unknown name.
Preset preset(const std::string& name);

}  // namespace cstirap
