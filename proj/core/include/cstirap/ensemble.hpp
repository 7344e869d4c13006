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

#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cstirap/pulses.hpp"
#include "cstirap/quantum.hpp"

namespace cstirap {

/// Physical parameters of one Lambda system. Angular frequencies in rad/s.
/// The pump detuning is detuning_stokes + two_photon_detuning.
struct LambdaSystem {
  double rabi_pump = 0.0;
  double rabi_stokes = 0.0;
  double detuning_stokes = 0.0;
  double two_photon_detuning = 0.0;
  DecayModel decay = DecayModel::none();
  double oscillator_strength_ratio = 1.0;  // f32 / f12

  double detuning_pump() const { return detuning_stokes + two_photon_detuning; }
  void validate() const;
};

/// Symmetric detuning grid -range, -range + step, ..., +range (in Hz).
struct DetuningGrid {
  double range_hz = 0.0;
  double step_hz = 1.0;

  std::vector<double> points_hz() const;
};

/// Inhomogeneous broadening: Gaussian optical and hyperfine distributions
/// (FWHM in Hz; +inf gives flat weights) sampled on truncated grids.
struct EnsembleSpec {
  double optical_fwhm_hz = 200e3;
  double hyperfine_fwhm_hz = 30e3;
  DetuningGrid optical{300e3, 20e3};
  DetuningGrid hyperfine{60e3, 4e3};

  /// One member at zero offset with unit weight.
  static EnsembleSpec homogeneous();
};

struct EnsembleMember {
  double optical_offset = 0.0;     // rad/s, shifts Delta_P and Delta_S
  double two_photon_offset = 0.0;  // rad/s, shifts Delta_P only
  double weight = 1.0;
};

/// Cartesian product of the optical and hyperfine grids with normalized
/// product-Gaussian weights (optical outer, hyperfine inner).
std::vector<EnsembleMember> ensemble_members(const EnsembleSpec& spec);

struct SpatialSample {
  double scale = 1.0;
  double weight = 1.0;
};

/// Averaging over the Rabi-frequency scale seen by atoms across the beam
/// profile. Both peaks are multiplied by the same scale factor.
struct SpatialAveragingSpec {
  bool enabled = false;
  std::vector<SpatialSample> samples{{1.0, 1.0}};

  /// Folded Gaussian centred on scale 1 (the beam peak): an n-point
  /// Gauss-Hermite rule for a normal with the given FWHM fraction, mapped
  /// to scale = 1 - |x|. Nodes at +-x merge, so n points give (n+1)/2
  /// samples for odd n.
  static SpatialAveragingSpec folded_gaussian(int points = 7, double fwhm_fraction = 0.15);
  static SpatialAveragingSpec disabled() { return SpatialAveragingSpec{}; }

  void validate() const;
};

struct SimulationSettings {
  double steps_per_fwhm = 2000.0;
  unsigned threads = 1;  // 0 = hardware concurrency
};

/// Copy of `shape` with the peak Rabi frequencies of `system`.
SequenceSpec sequence_for(const LambdaSystem& system, SequenceSpec shape);

/// Final rho_33 of one member starting from |1><1|.
double transfer_efficiency(const CompositeSequence& seq, const LambdaSystem& system,
                           const EnsembleMember& member, const SimulationSettings& settings = {});

/// Final density matrix of one member starting from |1><1|.
DensityMatrix3 final_density(const CompositeSequence& seq, const LambdaSystem& system,
                             const EnsembleMember& member, const SimulationSettings& settings = {});

/// Weighted mean of member efficiencies, with an outer weighted mean over the
/// spatial scale factors when enabled. The reduction order is fixed, so the
/// result does not depend on the thread count.
double ensemble_efficiency(const CompositeSequence& seq, const LambdaSystem& system,
                           const EnsembleSpec& spec, const SpatialAveragingSpec& spatial,
                           const SimulationSettings& settings = {});

/// Same as above on an explicit member list.
double ensemble_efficiency(const CompositeSequence& seq, const LambdaSystem& system,
                           const std::vector<EnsembleMember>& members,
                           const SpatialAveragingSpec& spatial,
                           const SimulationSettings& settings = {});

/// eta = 1 / (1 + x),  x = (alpha12 / alpha32) * f_ratio.
double probe_efficiency(double alpha12, double alpha32, double f_ratio);

struct ProbeAbsorption {
  double alpha12 = 0.0;
  double alpha32 = 0.0;
};

/// Absorption coefficients (common factor dropped) for populations P1, P3,
/// with f12 = 1 and f32 = f_ratio.
ProbeAbsorption simulate_probe(double p1, double p3, double f_ratio);

struct EfficiencyMap {
  std::vector<double> delays;  // s
  std::vector<double> scales;  // Rabi scale factors
  /// delays.size() x scales.size(), row-major by delay.
  std::vector<std::optional<double>> efficiency;
  std::vector<std::string> diagnostics;
  nlohmann::json metadata;

  std::optional<double> at(std::size_t delay_index, std::size_t scale_index) const;
  /// Maximum over present values; nullopt when every point is missing.
  std::optional<double> peak() const;
};

struct SweepSpec {
  SequenceSpec shape;  // peaks and delay are overwritten per point
  LambdaSystem system;
  EnsembleSpec ensemble = EnsembleSpec::homogeneous();
  SpatialAveragingSpec spatial;
  SimulationSettings settings;
  std::vector<double> delays;
  std::vector<double> scales{1.0};
};

struct SweepProgress {
  std::size_t done = 0;
  std::size_t total = 0;
  double delay = 0.0;
  double scale = 0.0;
  std::optional<double> efficiency;
};

using ProgressFn = std::function<void(const SweepProgress&)>;

/// Ensemble efficiency on the delay x scale grid. Per-point failures are
/// stored as missing values with a diagnostic line; the sweep continues.
EfficiencyMap sweep(const SweepSpec& spec, const ProgressFn& progress = {});

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = auto).
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

/// 2 pi * hz
constexpr double angular(double hz) { return 2.0 * std::numbers::pi * hz; }

}  // namespace cstirap
