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
#include "cstirap/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

namespace cstirap {

namespace {

using nlohmann::json;

struct Field {
  std::string key;
  std::function<json(const RunConfig&)> get;
  std::function<void(RunConfig&, const json&)> set;
};

[[noreturn]] void type_error(const std::string& key, const char* expected) {
  throw ConfigError("config key '" + key + "' must be " + expected, key);
}

Field number(std::string key, double RunConfig::*m) {
  return Field{key, [m](const RunConfig& c) { return json(c.*m); },
               [key, m](RunConfig& c, const json& v) {
                 if (!v.is_number()) type_error(key, "a number");
                 c.*m = v.get<double>();
               }};
}

Field integer(std::string key, int RunConfig::*m) {
  return Field{key, [m](const RunConfig& c) { return json(c.*m); },
               [key, m](RunConfig& c, const json& v) {
                 if (!v.is_number_integer()) type_error(key, "an integer");
                 c.*m = v.get<int>();
               }};
}

Field boolean(std::string key, bool RunConfig::*m) {
  return Field{key, [m](const RunConfig& c) { return json(c.*m); },
               [key, m](RunConfig& c, const json& v) {
                 if (!v.is_boolean()) type_error(key, "true or false");
                 c.*m = v.get<bool>();
               }};
}

Field number_list(std::string key, std::vector<double> RunConfig::*m) {
  return Field{key, [m](const RunConfig& c) { return json(c.*m); },
               [key, m](RunConfig& c, const json& v) {
                 if (!v.is_array()) type_error(key, "a list of numbers");
                 std::vector<double> out;
                 for (const json& x : v) {
                   if (!x.is_number()) type_error(key, "a list of numbers");
                   out.push_back(x.get<double>());
                 }
                 c.*m = std::move(out);
               }};
}

template <typename E>
Field enumeration(std::string key, E RunConfig::*m, std::optional<E> (*parse)(std::string_view)) {
  return Field{key, [m](const RunConfig& c) { return json(std::string(to_string(c.*m))); },
               [key, m, parse](RunConfig& c, const json& v) {
                 if (!v.is_string()) type_error(key, "a string");
                 const std::optional<E> e = parse(v.get<std::string>());
                 if (!e) {
                   throw ConfigError("config key '" + key + "' has unknown value '" +
                                         v.get<std::string>() + "'",
                                     key);
                 }
                 c.*m = *e;
               }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"name", [](const RunConfig& c) { return json(c.name); },
            [](RunConfig& c, const json& v) {
              if (!v.is_string()) type_error("name", "a string");
              c.name = v.get<std::string>();
            }},
      number("rabi_pump_hz", &RunConfig::rabi_pump_hz),
      number("rabi_stokes_hz", &RunConfig::rabi_stokes_hz),
      number("detuning_stokes_hz", &RunConfig::detuning_stokes_hz),
      number("two_photon_detuning_hz", &RunConfig::two_photon_detuning_hz),
      boolean("decay_enabled", &RunConfig::decay_enabled),
      number("t1_optical_s", &RunConfig::t1_optical_s),
      number("t2_hyperfine_s", &RunConfig::t2_hyperfine_s),
      number("oscillator_strength_ratio", &RunConfig::oscillator_strength_ratio),
      enumeration("family", &RunConfig::family, &parse_family),
      integer("n_pairs", &RunConfig::n_pairs),
      number("delay_s", &RunConfig::delay_s),
      number("fwhm_s", &RunConfig::fwhm_s),
      enumeration("first_ordering", &RunConfig::first_ordering, &parse_ordering),
      enumeration("repeat_style", &RunConfig::repeat_style, &parse_repeat_style),
      boolean("r5_literal_stokes_scale", &RunConfig::r5_literal_stokes_scale),
      number("truncation_fwhms", &RunConfig::truncation_fwhms),
      boolean("ensemble_enabled", &RunConfig::ensemble_enabled),
      number("optical_fwhm_hz", &RunConfig::optical_fwhm_hz),
      number("hyperfine_fwhm_hz", &RunConfig::hyperfine_fwhm_hz),
      number("optical_range_hz", &RunConfig::optical_range_hz),
      number("optical_step_hz", &RunConfig::optical_step_hz),
      number("hyperfine_range_hz", &RunConfig::hyperfine_range_hz),
      number("hyperfine_step_hz", &RunConfig::hyperfine_step_hz),
      boolean("spatial_enabled", &RunConfig::spatial_enabled),
      integer("spatial_points", &RunConfig::spatial_points),
      number("spatial_fwhm_fraction", &RunConfig::spatial_fwhm_fraction),
      number_list("sweep_delays_s", &RunConfig::sweep_delays_s),
      number_list("sweep_rabi_scales", &RunConfig::sweep_rabi_scales),
      number("steps_per_fwhm", &RunConfig::steps_per_fwhm),
  };
  return table;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("config key '" + key + "' " + what, key);
}

bool finite(double v) { return std::isfinite(v); }

// lo, lo + step, ..., hi in units of `unit`, built from integers so the
// points are exact multiples of the step.
std::vector<double> axis(int lo, int hi, int step, double unit) {
  std::vector<double> v;
  for (int k = lo; k <= hi; k += step) v.push_back(k * unit);
  return v;
}

RunConfig resonant_base() {
  RunConfig c;
  c.rabi_pump_hz = 635e3;
  c.rabi_stokes_hz = 510e3;
  c.fwhm_s = 17e-6;
  c.delay_s = 5e-6;
  c.decay_enabled = true;
  c.ensemble_enabled = true;
  c.spatial_enabled = true;
  c.repeat_style = RepeatStyle::Alternating;
  c.sweep_delays_s = axis(-24, 24, 1, 0.5e-6);
  return c;
}

RunConfig detuned_base() {
  RunConfig c;
  c.rabi_pump_hz = 640e3;
  c.rabi_stokes_hz = 550e3;
  c.detuning_stokes_hz = 1.75e6;
  c.fwhm_s = 14e-6;
  c.delay_s = 5e-6;
  c.decay_enabled = true;
  c.ensemble_enabled = true;
  c.repeat_style = RepeatStyle::NonAlternating;
  c.sweep_delays_s = axis(-20, 20, 1, 0.5e-6);
  return c;
}

RunConfig with_family(RunConfig c, const std::string& name, Family family, int n_pairs) {
  c.name = name;
  c.family = family;
  c.n_pairs = n_pairs;
  return c;
}

}  // namespace

void RunConfig::validate() const {
  require(finite(rabi_pump_hz) && rabi_pump_hz >= 0.0, "rabi_pump_hz", "must be finite and >= 0");
  require(finite(rabi_stokes_hz) && rabi_stokes_hz >= 0.0, "rabi_stokes_hz",
          "must be finite and >= 0");
  require(finite(detuning_stokes_hz), "detuning_stokes_hz", "must be finite");
  require(finite(two_photon_detuning_hz), "two_photon_detuning_hz", "must be finite");
  require(finite(t1_optical_s) && t1_optical_s > 0.0, "t1_optical_s", "must be positive");
  require(finite(t2_hyperfine_s) && t2_hyperfine_s > 0.0, "t2_hyperfine_s", "must be positive");
  require(finite(oscillator_strength_ratio) && oscillator_strength_ratio > 0.0,
          "oscillator_strength_ratio", "must be positive");
  require(finite(delay_s), "delay_s", "must be finite");
  require(finite(fwhm_s) && fwhm_s > 0.0, "fwhm_s", "must be positive");
  require(finite(truncation_fwhms) && truncation_fwhms > 0.0, "truncation_fwhms",
          "must be positive");
  require(n_pairs >= 1, "n_pairs", "must be >= 1");
  if (const std::optional<int> fixed = family_pairs(family)) {
    require(n_pairs == *fixed, "n_pairs",
            "must be " + std::to_string(*fixed) + " for family " + std::string(to_string(family)));
  }
  require(finite(optical_fwhm_hz) && optical_fwhm_hz > 0.0, "optical_fwhm_hz",
          "must be positive");
  require(finite(hyperfine_fwhm_hz) && hyperfine_fwhm_hz > 0.0, "hyperfine_fwhm_hz",
          "must be positive");
  require(finite(optical_range_hz) && optical_range_hz >= 0.0, "optical_range_hz",
          "must be finite and >= 0");
  require(finite(optical_step_hz) && optical_step_hz > 0.0, "optical_step_hz", "must be positive");
  require(finite(hyperfine_range_hz) && hyperfine_range_hz >= 0.0, "hyperfine_range_hz",
          "must be finite and >= 0");
  require(finite(hyperfine_step_hz) && hyperfine_step_hz > 0.0, "hyperfine_step_hz",
          "must be positive");
  require(spatial_points >= 1 && spatial_points % 2 == 1, "spatial_points",
          "must be a positive odd integer");
  require(finite(spatial_fwhm_fraction) && spatial_fwhm_fraction > 0.0, "spatial_fwhm_fraction",
          "must be positive");
  for (double d : sweep_delays_s) require(finite(d), "sweep_delays_s", "must contain finite values");
  require(!sweep_rabi_scales.empty(), "sweep_rabi_scales", "must not be empty");
  for (double s : sweep_rabi_scales) {
    require(finite(s) && s >= 0.0, "sweep_rabi_scales", "must contain finite values >= 0");
  }
  require(finite(steps_per_fwhm) && steps_per_fwhm >= 10.0, "steps_per_fwhm", "must be >= 10");
  if (spatial_enabled) {
    try {
      spatial();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("spatial averaging: ") + e.what(), "spatial_fwhm_fraction");
    }
  }
}

LambdaSystem RunConfig::system() const {
  LambdaSystem s;
  s.rabi_pump = angular(rabi_pump_hz);
  s.rabi_stokes = angular(rabi_stokes_hz);
  s.detuning_stokes = angular(detuning_stokes_hz);
  s.two_photon_detuning = angular(two_photon_detuning_hz);
  s.decay = DecayModel{t1_optical_s, t2_hyperfine_s, decay_enabled};
  s.oscillator_strength_ratio = oscillator_strength_ratio;
  return s;
}

SequenceSpec RunConfig::sequence() const {
  SequenceSpec spec;
  spec.family = family;
  spec.n_pairs = n_pairs;
  spec.delay = delay_s;
  spec.fwhm = fwhm_s;
  spec.first_ordering = first_ordering;
  spec.repeat_style = repeat_style;
  spec.r5_literal_stokes_scale = r5_literal_stokes_scale;
  spec.truncation_fwhms = truncation_fwhms;
  return sequence_for(system(), spec);
}

EnsembleSpec RunConfig::ensemble() const {
  if (!ensemble_enabled) return EnsembleSpec::homogeneous();
  EnsembleSpec e;
  e.optical_fwhm_hz = optical_fwhm_hz;
  e.hyperfine_fwhm_hz = hyperfine_fwhm_hz;
  e.optical = DetuningGrid{optical_range_hz, optical_step_hz};
  e.hyperfine = DetuningGrid{hyperfine_range_hz, hyperfine_step_hz};
  return e;
}

SpatialAveragingSpec RunConfig::spatial() const {
  if (!spatial_enabled) return SpatialAveragingSpec::disabled();
  return SpatialAveragingSpec::folded_gaussian(spatial_points, spatial_fwhm_fraction);
}

SimulationSettings RunConfig::settings(unsigned threads) const {
  return SimulationSettings{steps_per_fwhm, threads};
}

SweepSpec RunConfig::sweep_spec(unsigned threads) const {
  SweepSpec s;
  s.shape = sequence();
  s.system = system();
  s.ensemble = ensemble();
  s.spatial = spatial();
  s.settings = settings(threads);
  s.delays = sweep_delays_s.empty() ? std::vector<double>{delay_s} : sweep_delays_s;
  s.scales = sweep_rabi_scales;
  return s;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const Field& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

nlohmann::json to_json(const RunConfig& config) {
  json j = json::object();
  for (const Field& f : fields()) j[f.key] = f.get(config);
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  std::set<std::string> known;
  for (const Field& f : fields()) known.insert(f.key);
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) {
      throw ConfigError("unknown config key '" + item.key() + "'", item.key());
    }
  }
  RunConfig c;
  for (const Field& f : fields()) {
    if (auto it = j.find(f.key); it != j.end()) f.set(c, *it);
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig3", "fig3_unaveraged", "fig4a", "fig4b",
                                                 "fig5"};
  return names;
}

Preset preset(const std::string& name) {
  if (name == "fig3" || name == "fig3_unaveraged") {
    RunConfig base = resonant_base();
    base.spatial_enabled = name == "fig3";
    return Preset{name,
                  "resonant single, repeated (alternating) and R3 sequences vs pulse delay",
                  {with_family(base, name + "_single", Family::Single, 1),
                   with_family(base, name + "_repeat3", Family::Repeat, 3),
                   with_family(base, name + "_R3", Family::R3, 3)}};
  }
  if (name == "fig4a") {
    const RunConfig base = detuned_base();
    return Preset{name, "detuned single, repeated-3 (non-alternating), D3 and U3 vs pulse delay",
                  {with_family(base, "fig4a_single", Family::Single, 1),
                   with_family(base, "fig4a_repeat3", Family::Repeat, 3),
                   with_family(base, "fig4a_D3", Family::D3, 3),
                   with_family(base, "fig4a_U3", Family::U3, 3)}};
  }
  if (name == "fig4b") {
    const RunConfig base = detuned_base();
    return Preset{name, "detuned single, repeated-5 (non-alternating), D5 and U5b vs pulse delay",
                  {with_family(base, "fig4b_single", Family::Single, 1),
                   with_family(base, "fig4b_repeat5", Family::Repeat, 5),
                   with_family(base, "fig4b_D5", Family::D5, 5),
                   with_family(base, "fig4b_U5b", Family::U5b, 5)}};
  }
  if (name == "fig5") {
    // Omega_S = 0.85 Omega_0. The "sim" set lowers Omega_0 by 20 % relative to
    // the measured value to stand in for spatial averaging.
    Preset p{name, "detuned delay x Rabi-scale maps for single, repeated-5, U5a and U5b", {}};
    const struct {
      const char* tag;
      double omega0_hz;
    } sets[] = {{"exp", 640e3}, {"sim", 0.8 * 640e3}};
    const struct {
      const char* tag;
      Family family;
      int n_pairs;
    } curves[] = {{"single", Family::Single, 1},
                  {"repeat5", Family::Repeat, 5},
                  {"U5a", Family::U5a, 5},
                  {"U5b", Family::U5b, 5}};
    for (const auto& set : sets) {
      for (const auto& curve : curves) {
        RunConfig c = detuned_base();
        c.rabi_pump_hz = set.omega0_hz;
        c.rabi_stokes_hz = 0.85 * set.omega0_hz;
        c.sweep_delays_s = axis(-10, 10, 2, 1e-6);
        c.sweep_rabi_scales = axis(6, 14, 1, 0.1);
        p.runs.push_back(with_family(c, std::string("fig5_") + curve.tag + "_" + set.tag,
                                     curve.family, curve.n_pairs));
      }
    }
    return p;
  }
  std::ostringstream os;
  os << "unknown preset '" << name << "' (available:";
  for (const std::string& n : preset_names()) os << ' ' << n;
  os << ')';
  throw ConfigError(os.str());
}

}  // namespace cstirap
