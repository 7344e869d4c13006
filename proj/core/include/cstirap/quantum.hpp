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

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cstirap {

using Complex = std::complex<double>;
using Matrix3 = Eigen::Matrix3cd;
using Matrix2 = Eigen::Matrix2cd;
using StateVector3 = Eigen::Vector3cd;
using StateVector2 = Eigen::Vector2cd;
using DensityMatrix3 = Eigen::Matrix3cd;

/// Raised when a fixed-step integration drifts outside its conservation
/// tolerance or produces non-finite values.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Excited-state population loss and ground-state coherence loss.
///
/// Population of |2> leaves the system at rate 1/t1_optical (the trace
/// decreases). Ground-state decoherence is pure dephasing of |1> and |3>
/// (Lindblad operators sqrt(1/T2) |1><1| and sqrt(1/T2) |3><3|): rho_13
/// decays at 1/T2, rho_12 and rho_23 at 1/(2 T2), and no population moves.
/// Damping rho_13 alone would not keep rho positive.
struct DecayModel {
  double t1_optical_s = 164e-6;
  double t2_hyperfine_s = 500e-6;
  bool enabled = false;

  static DecayModel none() { return DecayModel{164e-6, 500e-6, false}; }
  static DecayModel with(double t1_s, double t2_s) { return DecayModel{t1_s, t2_s, true}; }

  void validate() const;

  /// Amplitude damping rate of |2>, i.e. 1/(2 T1). Zero when disabled.
  double excited_amplitude_rate() const;
  /// Damping rate of rho_13, i.e. 1/T2. Zero when disabled.
  double coherence_rate() const;
};

/// Uniform fixed-step grid. The step is shrunk so that an integer number of
/// steps lands exactly on t_end.
struct TimeGrid {
  double t_start = 0.0;
  double t_end = 0.0;
  double dt = 0.0;

  void validate() const;
  std::size_t steps() const;
  double step() const;
  double time_at(std::size_t n) const;
};

/// Instantaneous pump/Stokes drive seen by one atom. Rabi frequencies and
/// detunings in rad/s, phases in rad.
struct DriveValues {
  double rabi_pump = 0.0;
  double rabi_stokes = 0.0;
  double phase_pump = 0.0;
  double phase_stokes = 0.0;
  double detuning_pump = 0.0;
  double detuning_stokes = 0.0;
};

/// RWA Hamiltonian of the Lambda system (hbar = 1):
///   H12 = (Omega_P/2) e^{i phi_P},  H23 = (Omega_S/2) e^{-i phi_S},
///   H22 = Delta_P,  H33 = Delta_P - Delta_S,  H11 = 0.
Matrix3 rwa_hamiltonian(const DriveValues& drive);

/// Adds -i/(2 T1) to H22. Ground-state dephasing is not a Hamiltonian term;
/// propagate_density applies it to the coherences.
Matrix3 apply_decay(const Matrix3& hamiltonian, const DecayModel& decay);

using HamiltonianFn = std::function<Matrix3(double)>;

struct PropagationOptions {
  /// Keep every `sample_every`-th state (plus the final one). 0 keeps only
  /// the final state.
  std::size_t sample_every = 0;
  /// Expect a Hermitian generator; enables the norm/trace drift check.
  bool lossless = true;
  /// Maximal tolerated drift of norm (or trace) in lossless mode.
  double drift_tolerance = 1e-6;
};

struct StateTrajectory {
  std::vector<double> times;
  std::vector<StateVector3> states;
  StateVector3 final_state;
};

struct DensityTrajectory {
  std::vector<double> times;
  std::vector<DensityMatrix3> states;
  DensityMatrix3 final_state;
};

/// Classical RK4 integration of i d/dt psi = H(t) psi.
StateTrajectory propagate_state(const HamiltonianFn& hamiltonian, const StateVector3& psi0,
                                const TimeGrid& grid, const PropagationOptions& options = {});

/// Classical RK4 integration of d rho/dt = -i (H rho - rho H^dagger) with the
/// decay model folded in (H22 absorbing part plus ground-state dephasing).
/// `hamiltonian` must return the lossless (Hermitian) part.
DensityTrajectory propagate_density(const HamiltonianFn& hamiltonian, const DensityMatrix3& rho0,
                                    const DecayModel& decay, const TimeGrid& grid,
                                    const PropagationOptions& options = {});

/// Two-level RK4 propagation, used by the effective Raman model.
StateVector2 propagate_two_level(const std::function<Matrix2(double)>& hamiltonian,
                                 const StateVector2& psi0, const TimeGrid& grid,
                                 double drift_tolerance = 1e-6);

/// Off-diagonal couplings of a Lambda drive sampled on the RK4 half-step
/// lattice: entry 2n is t_n, entry 2n+1 is t_n + dt/2.
///   pump[k]   = (Omega_P/2) e^{i phi_P}
///   stokes[k] = (Omega_S/2) e^{-i phi_S}
struct CouplingSamples {
  TimeGrid grid;
  std::vector<Complex> pump;
  std::vector<Complex> stokes;
};

/// Samples `drive` (detunings ignored) on the half-step lattice of `grid`.
CouplingSamples sample_couplings(const std::function<DriveValues(double)>& drive,
                                 const TimeGrid& grid);

/// Structured density-matrix propagation for a Lambda system whose
/// detunings are constant in time. Equivalent to propagate_density with
/// rwa_hamiltonian, but without general 3x3 products. The couplings are
/// multiplied by `rabi_scale`.
DensityMatrix3 propagate_lambda_density(const CouplingSamples& couplings, double detuning_pump,
                                        double detuning_stokes, const DecayModel& decay,
                                        const DensityMatrix3& rho0, double rabi_scale = 1.0,
                                        double drift_tolerance = 1e-6);

struct LambdaDetunings {
  double pump = 0.0;    // Delta_P, rad/s
  double stokes = 0.0;  // Delta_S, rad/s
};

/// propagate_lambda_density for many atoms sharing one drive. Atoms are
/// integrated in fixed-width SIMD lanes that never interact, so each result
/// is independent of its neighbours in the batch.
void propagate_lambda_batch(const CouplingSamples& couplings,
                            std::span<const LambdaDetunings> detunings, const DecayModel& decay,
                            const DensityMatrix3& rho0, double rabi_scale,
                            std::span<DensityMatrix3> out, double drift_tolerance = 1e-6);

/// Max-abs deviation from Hermiticity, max |rho - rho^dagger|.
double hermiticity_defect(const Matrix3& m);

DensityMatrix3 pure_density(const StateVector3& psi);

StateVector3 basis_state(int level);  // level in {1,2,3}

}  // namespace cstirap
