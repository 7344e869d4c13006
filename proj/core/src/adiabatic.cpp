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

#include "cstirap/adiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace cstirap {

namespace {

// Composite Simpson rule of f over [a, b] with an even number of intervals.
template <typename F>
double simpson(const F& f, double a, double b, std::size_t intervals) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / static_cast<double>(intervals);
  double sum = f(a) + f(b);
  for (std::size_t i = 1; i < intervals; ++i) {
    sum += f(a + static_cast<double>(i) * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

}  // namespace

MixingAngles mixing_angles(double rabi_pump, double rabi_stokes, double detuning) {
  if (rabi_pump < 0.0 || rabi_stokes < 0.0) {
    throw std::invalid_argument("mixing_angles: Rabi frequencies must be non-negative");
  }
  if (rabi_pump == 0.0 && rabi_stokes == 0.0) {
    throw DegenerateDrive("mixing_angles: theta undefined when both fields vanish");
  }
  const double rms = std::hypot(rabi_pump, rabi_stokes);
  return MixingAngles{std::atan2(rabi_pump, rabi_stokes), 0.5 * std::atan2(rms, detuning)};
}

AdiabaticStates adiabatic_states(const MixingAngles& a) {
  const double st = std::sin(a.theta), ct = std::cos(a.theta);
  const double sp = std::sin(a.phi), cp = std::cos(a.phi);
  AdiabaticStates s;
  s.bright_plus << st * sp, cp, ct * sp;
  s.bright_minus << st * cp, -sp, ct * cp;
  s.dark << ct, 0.0, -st;
  return s;
}

double pulse_area(const CompositeSequence& seq, AreaScope scope, int intervals_per_fwhm) {
  if (seq.pairs.empty()) return 0.0;
  const double end = scope == AreaScope::Pair ? seq.slot : seq.duration();
  const auto intervals =
      static_cast<std::size_t>(std::ceil(end / seq.fwhm * std::max(intervals_per_fwhm, 2)));
  auto rms = [&](double t) {
    const Drive d = drive_at(seq, t);
    return std::hypot(d.rabi_pump, d.rabi_stokes);
  };
  return simpson(rms, 0.0, end, std::max<std::size_t>(intervals, 2));
}

EffectiveCoupling effective_coupling(double rabi_pump, double rabi_stokes, double detuning) {
  if (detuning == 0.0 || !std::isfinite(detuning)) {
    throw std::invalid_argument("adiabatic elimination requires a finite nonzero detuning");
  }
  return EffectiveCoupling{-rabi_pump * rabi_stokes / (2.0 * detuning),
                           (rabi_pump * rabi_pump - rabi_stokes * rabi_stokes) / (2.0 * detuning)};
}

EffectiveTwoLevel effective_two_level(const CompositeSequence& seq, double detuning,
                                      double two_photon_detuning, const TimeGrid& grid) {
  grid.validate();
  effective_coupling(0.0, 0.0, detuning);  // rejects Delta = 0
  EffectiveTwoLevel out;
  out.detuning = detuning;
  out.two_photon_detuning = two_photon_detuning;
  const std::size_t n = grid.steps();
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = grid.time_at(k);
    const Drive d = drive_at(seq, t);
    const EffectiveCoupling c = effective_coupling(d.rabi_pump, d.rabi_stokes, detuning);
    out.times.push_back(t);
    out.omega_e.push_back(c.omega_e);
    out.delta_e.push_back(c.delta_e);
  }
  out.area = simpson(
      [&](double t) {
        const Drive d = drive_at(seq, t);
        return std::abs(effective_coupling(d.rabi_pump, d.rabi_stokes, detuning).omega_e);
      },
      grid.t_start, grid.t_end, n);
  return out;
}

Matrix2 effective_hamiltonian(const CompositeSequence& seq, double t, double detuning,
                              double two_photon_detuning, double phase_offset) {
  const Drive d = drive_at(seq, t);
  const EffectiveCoupling c = effective_coupling(d.rabi_pump, d.rabi_stokes, detuning);
  const Complex coupling =
      0.5 * c.omega_e * std::polar(1.0, d.phase_pump - d.phase_stokes + phase_offset);
  Matrix2 h;
  h << 0.0, coupling, std::conj(coupling), two_photon_detuning + 0.5 * c.delta_e;
  return h;
}

TwoLevelPopulations propagate_effective(const CompositeSequence& seq, double detuning,
                                        double two_photon_detuning, const StateVector2& psi0,
                                        const TimeGrid& grid, double phase_offset) {
  const StateVector2 psi = propagate_two_level(
      [&](double t) {
        return effective_hamiltonian(seq, t, detuning, two_photon_detuning, phase_offset);
      },
      psi0, grid);
  return TwoLevelPopulations{std::norm(psi(0)), std::norm(psi(1))};
}

std::optional<StateVector3> dark_state(const Drive& drive) {
  // H |d> = 0 on row 2:  conj(H12) d1 + H23 d3 = 0.
  const Complex h12 = 0.5 * drive.rabi_pump * std::polar(1.0, drive.phase_pump);
  const Complex h23 = 0.5 * drive.rabi_stokes * std::polar(1.0, -drive.phase_stokes);
  const double norm = std::hypot(std::abs(h12), std::abs(h23));
  if (norm == 0.0) return std::nullopt;
  StateVector3 d;
  d << h23 / norm, 0.0, -std::conj(h12) / norm;
  return d;
}

namespace {

template <typename Trajectory, typename Overlap>
std::vector<double> overlaps(const Trajectory& trajectory, const CompositeSequence& seq,
                             const Overlap& overlap) {
  std::vector<double> out;
  out.reserve(trajectory.times.size());
  StateVector3 last = basis_state(1);
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    if (auto d = dark_state(drive_at(seq, trajectory.times[i]))) last = *d;
    out.push_back(overlap(last, trajectory.states[i]));
  }
  return out;
}

}  // namespace

std::vector<double> dark_state_overlap(const StateTrajectory& trajectory,
                                       const CompositeSequence& seq) {
  return overlaps(trajectory, seq, [](const StateVector3& d, const StateVector3& psi) {
    return std::norm(d.dot(psi));
  });
}

std::vector<double> dark_state_overlap(const DensityTrajectory& trajectory,
                                       const CompositeSequence& seq) {
  return overlaps(trajectory, seq, [](const StateVector3& d, const DensityMatrix3& rho) {
    return (d.adjoint() * rho * d)(0, 0).real();
  });
}

}  // namespace cstirap
