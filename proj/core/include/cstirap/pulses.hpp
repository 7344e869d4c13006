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
#include <string>
#include <string_view>
#include <vector>

#include "cstirap/quantum.hpp"

namespace cstirap {

/// Pulse ordering inside one pair. SP: Stokes precedes pump by the delay
/// (counter-intuitive for transfer out of |1>). PS: pump precedes Stokes.
enum class Ordering { SP, PS };

enum class Family { Single, Repeat, R3, R5, D3, D5, U3, U5a, U5b };

/// How REPEAT sequences order their pairs.
enum class RepeatStyle { Alternating, NonAlternating };

std::string_view to_string(Ordering o);
std::string_view to_string(Family f);
std::string_view to_string(RepeatStyle s);
std::optional<Ordering> parse_ordering(std::string_view s);
std::optional<Family> parse_family(std::string_view s);
std::optional<RepeatStyle> parse_repeat_style(std::string_view s);

Ordering flipped(Ordering o);

/// Truncated Gaussian Rabi-frequency envelope.
struct GaussianPulse {
  double peak_rabi = 0.0;  // rad/s
  double center = 0.0;     // s
  double fwhm = 0.0;       // s
  double phase = 0.0;      // rad
  double truncation_halfwidth = 0.0;  // s, window is center +- this

  static GaussianPulse make(double peak_rabi, double center, double fwhm, double phase = 0.0);

  double envelope(double t) const;
  double support_begin() const { return center - truncation_halfwidth; }
  double support_end() const { return center + truncation_halfwidth; }
  bool active(double t) const { return t >= support_begin() && t <= support_end(); }
};

struct PulsePair {
  Ordering ordering = Ordering::SP;
  double delay = 0.0;  // signed; Stokes center = pump center - s*delay, s = +1 (SP) / -1 (PS)
  GaussianPulse pump;
  GaussianPulse stokes;

  /// Ordering actually realized in time (the nominal one flips for delay < 0).
  Ordering effective_ordering() const;
};

struct PhaseTable {
  std::vector<double> pump;
  std::vector<double> stokes;
};

/// Phases of the named composite families. `r5_literal_stokes_scale` selects
/// the (4,8,3,5,0)*pi/3 Stokes row for R5 instead of (4,8,3,5,0)*pi/5.
PhaseTable phase_table(Family family, bool r5_literal_stokes_scale = false);

/// Number of pairs a named family requires; nullopt for SINGLE/REPEAT.
std::optional<int> family_pairs(Family family);

/// True for families whose pair ordering alternates (R3, R5).
bool family_alternates(Family family);

struct SequenceSpec {
  Family family = Family::Single;
  int n_pairs = 1;
  double delay = 0.0;        // s
  double fwhm = 17e-6;       // s
  double peak_pump = 0.0;    // rad/s
  double peak_stokes = 0.0;  // rad/s
  Ordering first_ordering = Ordering::SP;
  RepeatStyle repeat_style = RepeatStyle::Alternating;
  bool r5_literal_stokes_scale = false;
  double truncation_fwhms = 1.5;  // half-window in units of fwhm
};

struct CompositeSequence {
  Family family = Family::Single;
  std::vector<PulsePair> pairs;
  std::vector<double> pump_phases;
  std::vector<double> stokes_phases;
  double slot = 0.0;  // s, width of one pair's time slot
  double fwhm = 0.0;
  std::vector<std::string> warnings;

  int n_pairs() const { return static_cast<int>(pairs.size()); }
  double duration() const { return slot * static_cast<double>(pairs.size()); }
};

/// Lays out n_pairs back-to-back slots of width 3*T + |delay|.
/// Throws std::invalid_argument on family/n_pairs mismatch or invalid
/// durations; a delay too long for the pulses to overlap only adds a warning.
CompositeSequence build_sequence(const SequenceSpec& spec);

struct Drive {
  double rabi_pump = 0.0;
  double rabi_stokes = 0.0;
  double phase_pump = 0.0;
  double phase_stokes = 0.0;
};

Drive drive_at(const CompositeSequence& seq, double t);

/// Integration grid covering the sequence, step = fwhm / steps_per_fwhm.
TimeGrid sequence_grid(const CompositeSequence& seq, double steps_per_fwhm = 2000.0);

/// drive_at combined with constant detunings, in the form rwa_hamiltonian
/// expects.
DriveValues drive_values(const CompositeSequence& seq, double t, double detuning_pump,
                         double detuning_stokes);

}  // namespace cstirap
