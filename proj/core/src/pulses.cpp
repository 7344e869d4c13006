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

#include "cstirap/pulses.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cstirap {

using std::numbers::pi;

std::string_view to_string(Ordering o) { return o == Ordering::SP ? "SP" : "PS"; }

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Single: return "single";
    case Family::Repeat: return "repeat";
    case Family::R3: return "R3";
    case Family::R5: return "R5";
    case Family::D3: return "D3";
    case Family::D5: return "D5";
    case Family::U3: return "U3";
    case Family::U5a: return "U5a";
    case Family::U5b: return "U5b";
  }
  return "?";
}

std::string_view to_string(RepeatStyle s) {
  return s == RepeatStyle::Alternating ? "alternating" : "non_alternating";
}

std::optional<Ordering> parse_ordering(std::string_view s) {
  if (s == "SP") return Ordering::SP;
  if (s == "PS") return Ordering::PS;
  return std::nullopt;
}

std::optional<Family> parse_family(std::string_view s) {
  for (Family f : {Family::Single, Family::Repeat, Family::R3, Family::R5, Family::D3,
                   Family::D5, Family::U3, Family::U5a, Family::U5b}) {
    if (s == to_string(f)) return f;
  }
  return std::nullopt;
}

std::optional<RepeatStyle> parse_repeat_style(std::string_view s) {
  if (s == "alternating") return RepeatStyle::Alternating;
  if (s == "non_alternating") return RepeatStyle::NonAlternating;
  return std::nullopt;
}

Ordering flipped(Ordering o) { return o == Ordering::SP ? Ordering::PS : Ordering::SP; }

GaussianPulse GaussianPulse::make(double peak_rabi, double center, double fwhm, double phase) {
  return GaussianPulse{peak_rabi, center, fwhm, phase, 1.5 * fwhm};
}

double GaussianPulse::envelope(double t) const {
  if (!active(t)) return 0.0;
  const double x = (t - center) / fwhm;
  return peak_rabi * std::exp(-4.0 * std::numbers::ln2 * x * x);
}

Ordering PulsePair::effective_ordering() const {
  return delay < 0.0 ? flipped(ordering) : ordering;
}

PhaseTable phase_table(Family family, bool r5_literal_stokes_scale) {
  auto scaled = [](std::initializer_list<int> k, double unit) {
    std::vector<double> v;
    for (int x : k) v.push_back(x * unit);
    return v;
  };
  switch (family) {
    case Family::Single: return {{0.0}, {0.0}};
    case Family::R3: return {scaled({0, 3, 1}, pi / 3), scaled({1, 3, 0}, pi / 3)};
    case Family::R5:
      return {scaled({0, 5, 3, 8, 4}, pi / 5),
              scaled({4, 8, 3, 5, 0}, r5_literal_stokes_scale ? pi / 3 : pi / 5)};
    case Family::D3: return {scaled({0, 1, 0}, 2 * pi / 3), std::vector<double>(3, 0.0)};
    case Family::D5: return {scaled({0, 2, 1, 2, 0}, 2 * pi / 5), std::vector<double>(5, 0.0)};
    case Family::U3: return {scaled({0, 1, 0}, pi / 2), std::vector<double>(3, 0.0)};
    case Family::U5a: return {scaled({0, 5, 2, 5, 0}, pi / 6), std::vector<double>(5, 0.0)};
    case Family::U5b: return {scaled({0, 11, 2, 11, 0}, pi / 6), std::vector<double>(5, 0.0)};
    case Family::Repeat: break;
  }
  throw std::invalid_argument("phase_table: REPEAT has no phase table");
}

std::optional<int> family_pairs(Family family) {
  switch (family) {
    case Family::R3:
    case Family::D3:
    case Family::U3: return 3;
    case Family::R5:
    case Family::D5:
    case Family::U5a:
    case Family::U5b: return 5;
    case Family::Single:
    case Family::Repeat: return std::nullopt;
  }
  return std::nullopt;
}

bool family_alternates(Family family) { return family == Family::R3 || family == Family::R5; }

CompositeSequence build_sequence(const SequenceSpec& spec) {
  if (!(spec.fwhm > 0.0) || !std::isfinite(spec.fwhm)) {
    throw std::invalid_argument("build_sequence: pulse FWHM must be positive");
  }
  if (!std::isfinite(spec.delay)) throw std::invalid_argument("build_sequence: non-finite delay");
  if (!(spec.peak_pump >= 0.0) || !(spec.peak_stokes >= 0.0) ||
      !std::isfinite(spec.peak_pump) || !std::isfinite(spec.peak_stokes)) {
    throw std::invalid_argument("build_sequence: peak Rabi frequencies must be finite and >= 0");
  }
  if (!(spec.truncation_fwhms > 0.0)) {
    throw std::invalid_argument("build_sequence: truncation window must be positive");
  }
  if (spec.n_pairs < 1) throw std::invalid_argument("build_sequence: n_pairs must be >= 1");
  if (spec.family == Family::Single && spec.n_pairs != 1) {
    throw std::invalid_argument("build_sequence: SINGLE requires n_pairs = 1");
  }
  if (auto required = family_pairs(spec.family); required && *required != spec.n_pairs) {
    std::ostringstream os;
    os << "build_sequence: family " << to_string(spec.family) << " requires n_pairs = "
       << *required << ", got " << spec.n_pairs;
    throw std::invalid_argument(os.str());
  }

  CompositeSequence seq;
  seq.family = spec.family;
  seq.fwhm = spec.fwhm;
  if (spec.family == Family::Repeat) {
    seq.pump_phases.assign(spec.n_pairs, 0.0);
    seq.stokes_phases.assign(spec.n_pairs, 0.0);
  } else {
    PhaseTable table = phase_table(spec.family, spec.r5_literal_stokes_scale);
    seq.pump_phases = std::move(table.pump);
    seq.stokes_phases = std::move(table.stokes);
  }

  const bool alternate = family_alternates(spec.family) ||
                         (spec.family == Family::Repeat &&
                          spec.repeat_style == RepeatStyle::Alternating);
  const double half_window = spec.truncation_fwhms * spec.fwhm;
  const double gap = std::abs(spec.delay);
  seq.slot = 2.0 * half_window + gap;
  if (gap >= 2.0 * half_window) {
    std::ostringstream os;
    os << "pulse delay " << spec.delay << " s exceeds the truncated support; pump and Stokes "
       << "pulses do not overlap";
    seq.warnings.push_back(os.str());
  }

  Ordering nominal = spec.first_ordering;
  for (int k = 0; k < spec.n_pairs; ++k) {
    PulsePair pair;
    pair.ordering = nominal;
    pair.delay = spec.delay;
    const double slot_start = k * seq.slot;
    const double first = slot_start + half_window;
    const double second = first + gap;
    const bool stokes_first = pair.effective_ordering() == Ordering::SP;
    pair.pump = GaussianPulse::make(spec.peak_pump, stokes_first ? second : first, spec.fwhm,
                                    seq.pump_phases[k]);
    pair.stokes = GaussianPulse::make(spec.peak_stokes, stokes_first ? first : second, spec.fwhm,
                                      seq.stokes_phases[k]);
    pair.pump.truncation_halfwidth = half_window;
    pair.stokes.truncation_halfwidth = half_window;
    seq.pairs.push_back(pair);
    if (alternate) nominal = flipped(nominal);
  }
  return seq;
}

Drive drive_at(const CompositeSequence& seq, double t) {
  Drive d;
  if (seq.pairs.empty() || !(seq.slot > 0.0)) return d;
  const double slot_index = std::floor(t / seq.slot);
  const long centre = static_cast<long>(slot_index);
  double best_pump = -1.0;
  double best_stokes = -1.0;
  // Supports can only touch at slot boundaries, so neighbours suffice.
  for (long k = centre - 1; k <= centre + 1; ++k) {
    if (k < 0 || k >= static_cast<long>(seq.pairs.size())) continue;
    const PulsePair& p = seq.pairs[static_cast<std::size_t>(k)];
    const double ep = p.pump.envelope(t);
    const double es = p.stokes.envelope(t);
    d.rabi_pump += ep;
    d.rabi_stokes += es;
    if (p.pump.active(t) && ep > best_pump) {
      best_pump = ep;
      d.phase_pump = p.pump.phase;
    }
    if (p.stokes.active(t) && es > best_stokes) {
      best_stokes = es;
      d.phase_stokes = p.stokes.phase;
    }
  }
  return d;
}

TimeGrid sequence_grid(const CompositeSequence& seq, double steps_per_fwhm) {
  if (!(steps_per_fwhm > 0.0)) throw std::invalid_argument("steps_per_fwhm must be positive");
  return TimeGrid{0.0, seq.duration(), seq.fwhm / steps_per_fwhm};
}

DriveValues drive_values(const CompositeSequence& seq, double t, double detuning_pump,
                         double detuning_stokes) {
  const Drive d = drive_at(seq, t);
  return DriveValues{d.rabi_pump,    d.rabi_stokes,  d.phase_pump,
                     d.phase_stokes, detuning_pump, detuning_stokes};
}

}  // namespace cstirap
