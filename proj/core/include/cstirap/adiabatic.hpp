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

#include <optional>
#include <stdexcept>
#include <vector>

#include "cstirap/pulses.hpp"
#include "cstirap/quantum.hpp"

namespace cstirap {

/// Raised when the mixing angle theta is undefined (both fields off).
class DegenerateDrive : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct MixingAngles {
  double theta = 0.0;  // arctan(Omega_P / Omega_S), [0, pi/2]
  double phi = 0.0;    // arctan(Omega_rms / Delta) / 2, [0, pi/2]
};

/// Rabi frequencies must be non-negative; Delta may have either sign
/// (phi is taken from atan2 so it stays in [0, pi/2]).
MixingAngles mixing_angles(double rabi_pump, double rabi_stokes, double detuning);

struct AdiabaticStates {
  StateVector3 bright_plus;
  StateVector3 bright_minus;
  StateVector3 dark;
};

AdiabaticStates adiabatic_states(const MixingAngles& angles);

enum class AreaScope { Pair, Total };

/// Integral of Omega_rms(t) (Simpson rule) over the first pair's slot or the
/// whole sequence.
double pulse_area(const CompositeSequence& seq, AreaScope scope,
                  int intervals_per_fwhm = 400);

/// Pointwise adiabatic-elimination couplings.
///   omega_e = -Omega_P Omega_S / (2 Delta)
///   delta_e = (Omega_P^2 - Omega_S^2) / (2 Delta)
struct EffectiveCoupling {
  double omega_e = 0.0;
  double delta_e = 0.0;
};

EffectiveCoupling effective_coupling(double rabi_pump, double rabi_stokes, double detuning);

struct EffectiveTwoLevel {
  std::vector<double> times;
  std::vector<double> omega_e;
  std::vector<double> delta_e;
  double detuning = 0.0;             // single-photon Delta used for elimination
  double two_photon_detuning = 0.0;  // delta
  double area = 0.0;                 // integral of |omega_e|
};

/// Samples omega_e/delta_e of `seq` on `grid`; area by Simpson quadrature.
/// Throws std::invalid_argument for Delta = 0.
EffectiveTwoLevel effective_two_level(const CompositeSequence& seq, double detuning,
                                      double two_photon_detuning, const TimeGrid& grid);

/// Effective Raman Hamiltonian in the {|1>, |3>} basis at time t:
///   [[0, (omega_e/2) e^{i(phi_P - phi_S + phase_offset)}],
///    [h.c., delta + delta_e/2]]
/// The diagonal is the light-shift difference of the eliminated system with
/// its time-dependent common part removed.
Matrix2 effective_hamiltonian(const CompositeSequence& seq, double t, double detuning,
                              double two_photon_detuning, double phase_offset = 0.0);

/// Final populations {P1, P3} of the effective two-level model.
struct TwoLevelPopulations {
  double p1 = 0.0;
  double p3 = 0.0;
};

TwoLevelPopulations propagate_effective(const CompositeSequence& seq, double detuning,
                                        double two_photon_detuning, const StateVector2& psi0,
                                        const TimeGrid& grid, double phase_offset = 0.0);

/// Instantaneous dark state including field phases; reduces to
/// cos(theta)|1> - sin(theta)|3> for zero phases. Returns nullopt when both
/// fields vanish.
std::optional<StateVector3> dark_state(const Drive& drive);

/// |<d(t)|psi(t)>|^2 per sample. While both fields are off the last defined
/// dark state is reused (|1> before the first pulse).
std::vector<double> dark_state_overlap(const StateTrajectory& trajectory,
                                       const CompositeSequence& seq);

/// <d(t)|rho(t)|d(t)> per sample.
std::vector<double> dark_state_overlap(const DensityTrajectory& trajectory,
                                       const CompositeSequence& seq);

}  // namespace cstirap
