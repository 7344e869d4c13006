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

#include "cstirap/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace cstirap {

void LambdaSystem::validate() const {
  if (!(rabi_pump >= 0.0) || !(rabi_stokes >= 0.0) || !std::isfinite(rabi_pump) ||
      !std::isfinite(rabi_stokes)) {
    throw std::invalid_argument("LambdaSystem: peak Rabi frequencies must be finite and >= 0");
  }
  if (!std::isfinite(detuning_stokes) || !std::isfinite(two_photon_detuning)) {
    throw std::invalid_argument("LambdaSystem: detunings must be finite");
  }
  if (!(oscillator_strength_ratio > 0.0)) {
    throw std::invalid_argument("LambdaSystem: oscillator strength ratio must be positive");
  }
  decay.validate();
}

std::vector<double> DetuningGrid::points_hz() const {
  if (!(range_hz >= 0.0) || !std::isfinite(range_hz)) {
    throw std::invalid_argument("detuning grid range must be finite and >= 0");
  }
  if (range_hz == 0.0) return {0.0};
  if (!(step_hz > 0.0)) throw std::invalid_argument("detuning grid step must be positive");
  const auto half = static_cast<long>(std::floor(range_hz / step_hz + 1e-9));
  std::vector<double> v;
  for (long i = -half; i <= half; ++i) v.push_back(static_cast<double>(i) * step_hz);
  return v;
}

EnsembleSpec EnsembleSpec::homogeneous() {
  EnsembleSpec s;
  s.optical = DetuningGrid{0.0, 1.0};
  s.hyperfine = DetuningGrid{0.0, 1.0};
  return s;
}

namespace {

double gaussian_weight(double x_hz, double fwhm_hz) {
  if (std::isinf(fwhm_hz)) return 1.0;
  if (!(fwhm_hz > 0.0)) throw std::invalid_argument("broadening FWHM must be positive");
  const double u = x_hz / fwhm_hz;
  return std::exp(-4.0 * std::numbers::ln2 * u * u);
}

}  // namespace

std::vector<EnsembleMember> ensemble_members(const EnsembleSpec& spec) {
  const std::vector<double> optical = spec.optical.points_hz();
  const std::vector<double> hyperfine = spec.hyperfine.points_hz();
  std::vector<EnsembleMember> members;
  members.reserve(optical.size() * hyperfine.size());
  double total = 0.0;
  for (double o : optical) {
    const double wo = gaussian_weight(o, spec.optical_fwhm_hz);
    for (double h : hyperfine) {
      const double w = wo * gaussian_weight(h, spec.hyperfine_fwhm_hz);
      members.push_back(EnsembleMember{angular(o), angular(h), w});
      total += w;
    }
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("ensemble weights sum to zero; broadening widths are degenerate");
  }
  for (EnsembleMember& m : members) m.weight /= total;
  return members;
}

SpatialAveragingSpec SpatialAveragingSpec::folded_gaussian(int points, double fwhm_fraction) {
  if (points < 1) throw std::invalid_argument("spatial averaging needs at least one point");
  if (!(fwhm_fraction > 0.0)) throw std::invalid_argument("spatial FWHM must be positive");
  // Golub-Welsch for the probabilists' Hermite weight exp(-x^2/2).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(points, points);
  for (int k = 1; k < points; ++k) {
    jacobi(k - 1, k) = jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  const double sigma = fwhm_fraction / (2.0 * std::sqrt(2.0 * std::numbers::ln2));

  SpatialAveragingSpec spec;
  spec.enabled = true;
  spec.samples.clear();
  for (int i = 0; i < points; ++i) {
    const double x = std::abs(solver.eigenvalues()(i));
    const double w = solver.eigenvectors()(0, i) * solver.eigenvectors()(0, i);
    const double scale = 1.0 - x * sigma;
    auto same = std::find_if(spec.samples.begin(), spec.samples.end(),
                             [&](const SpatialSample& s) { return std::abs(s.scale - scale) < 1e-12; });
    if (same != spec.samples.end()) {
      same->weight += w;
    } else {
      spec.samples.push_back(SpatialSample{scale, w});
    }
  }
  std::sort(spec.samples.begin(), spec.samples.end(),
            [](const SpatialSample& a, const SpatialSample& b) { return a.scale > b.scale; });
  double total = 0.0;
  for (const SpatialSample& s : spec.samples) total += s.weight;
  for (SpatialSample& s : spec.samples) s.weight /= total;
  spec.validate();
  return spec;
}

void SpatialAveragingSpec::validate() const {
  if (!enabled) return;
  if (samples.empty()) throw std::invalid_argument("spatial averaging has no samples");
  double total = 0.0;
  for (const SpatialSample& s : samples) {
    if (!(s.scale > 0.0 && s.scale <= 1.0)) {
      throw std::invalid_argument("spatial scale factors must lie in (0, 1]");
    }
    if (!(s.weight >= 0.0)) throw std::invalid_argument("spatial weights must be non-negative");
    total += s.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("spatial weights must sum to 1");
}

SequenceSpec sequence_for(const LambdaSystem& system, SequenceSpec shape) {
  shape.peak_pump = system.rabi_pump;
  shape.peak_stokes = system.rabi_stokes;
  return shape;
}

namespace {

CouplingSamples couplings_of(const CompositeSequence& seq, const SimulationSettings& settings) {
  return sample_couplings([&](double t) { return drive_values(seq, t, 0.0, 0.0); },
                          sequence_grid(seq, settings.steps_per_fwhm));
}

DensityMatrix3 member_density(const CouplingSamples& couplings, const LambdaSystem& system,
                              const EnsembleMember& member, double scale) {
  const double dp = system.detuning_pump() + member.optical_offset + member.two_photon_offset;
  const double ds = system.detuning_stokes + member.optical_offset;
  return propagate_lambda_density(couplings, dp, ds, system.decay, pure_density(basis_state(1)),
                                  scale);
}

}  // namespace

DensityMatrix3 final_density(const CompositeSequence& seq, const LambdaSystem& system,
                             const EnsembleMember& member, const SimulationSettings& settings) {
  system.validate();
  return member_density(couplings_of(seq, settings), system, member, 1.0);
}

double transfer_efficiency(const CompositeSequence& seq, const LambdaSystem& system,
                           const EnsembleMember& member, const SimulationSettings& settings) {
  return final_density(seq, system, member, settings)(2, 2).real();
}

double ensemble_efficiency(const CompositeSequence& seq, const LambdaSystem& system,
                           const EnsembleSpec& spec, const SpatialAveragingSpec& spatial,
                           const SimulationSettings& settings) {
  return ensemble_efficiency(seq, system, ensemble_members(spec), spatial, settings);
}

double ensemble_efficiency(const CompositeSequence& seq, const LambdaSystem& system,
                           const std::vector<EnsembleMember>& members,
                           const SpatialAveragingSpec& spatial,
                           const SimulationSettings& settings) {
  system.validate();
  spatial.validate();
  const CouplingSamples couplings = couplings_of(seq, settings);
  const std::vector<SpatialSample> scales =
      spatial.enabled ? spatial.samples : std::vector<SpatialSample>{{1.0, 1.0}};

  const std::size_t n = members.size();
  std::vector<LambdaDetunings> detunings(n);
  for (std::size_t m = 0; m < n; ++m) {
    detunings[m].pump =
        system.detuning_pump() + members[m].optical_offset + members[m].two_photon_offset;
    detunings[m].stokes = system.detuning_stokes + members[m].optical_offset;
  }

  // Work is split into fixed chunks so every member lands in the same SIMD
  // batch whatever the thread count.
  constexpr std::size_t kChunk = 64;
  const std::size_t chunks_per_scale = (n + kChunk - 1) / kChunk;
  const DensityMatrix3 rho0 = pure_density(basis_state(1));
  std::vector<DensityMatrix3> rho(scales.size() * n);
  parallel_for(scales.size() * chunks_per_scale, settings.threads, [&](std::size_t c) {
    const std::size_t s = c / chunks_per_scale;
    const std::size_t first = (c % chunks_per_scale) * kChunk;
    const std::size_t count = std::min(kChunk, n - first);
    propagate_lambda_batch(couplings, std::span(detunings).subspan(first, count), system.decay,
                           rho0, scales[s].scale, std::span(rho).subspan(s * n + first, count));
  });
  std::vector<double> eta(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) eta[i] = rho[i](2, 2).real();

  double total = 0.0;
  for (std::size_t s = 0; s < scales.size(); ++s) {
    double inner = 0.0;
    for (std::size_t m = 0; m < n; ++m) inner += members[m].weight * eta[s * n + m];
    total += scales[s].weight * inner;
  }
  return total;
}

double probe_efficiency(double alpha12, double alpha32, double f_ratio) {
  if (!(f_ratio > 0.0)) throw std::invalid_argument("probe_efficiency: f_ratio must be positive");
  if (alpha12 < 0.0 || alpha32 < 0.0) {
    throw std::invalid_argument("probe_efficiency: absorption coefficients must be >= 0");
  }
  if (alpha32 == 0.0) {
    if (alpha12 > 0.0) return 0.0;
    throw std::invalid_argument("probe_efficiency: both absorption coefficients vanish");
  }
  const double x = (alpha12 / alpha32) * f_ratio;
  return 1.0 / (1.0 + x);
}

ProbeAbsorption simulate_probe(double p1, double p3, double f_ratio) {
  if (p1 < 0.0 || p3 < 0.0) throw std::invalid_argument("simulate_probe: populations must be >= 0");
  if (p1 + p3 == 0.0) throw std::invalid_argument("simulate_probe: P1 + P3 = 0 is degenerate");
  if (!(f_ratio > 0.0)) throw std::invalid_argument("simulate_probe: f_ratio must be positive");
  return ProbeAbsorption{p1, f_ratio * p3};
}

std::optional<double> EfficiencyMap::at(std::size_t delay_index, std::size_t scale_index) const {
  return efficiency.at(delay_index * scales.size() + scale_index);
}

std::optional<double> EfficiencyMap::peak() const {
  std::optional<double> best;
  for (const auto& v : efficiency) {
    if (v && (!best || *v > *best)) best = v;
  }
  return best;
}

EfficiencyMap sweep(const SweepSpec& spec, const ProgressFn& progress) {
  if (spec.delays.empty() || spec.scales.empty()) {
    throw std::invalid_argument("sweep: axes must be nonempty");
  }
  for (double v : spec.delays) {
    if (!std::isfinite(v)) throw std::invalid_argument("sweep: delay axis must be finite");
  }
  for (double v : spec.scales) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("sweep: Rabi scale axis must be finite and >= 0");
    }
  }
  spec.system.validate();
  const std::vector<EnsembleMember> members = ensemble_members(spec.ensemble);

  EfficiencyMap map;
  map.delays = spec.delays;
  map.scales = spec.scales;
  map.efficiency.assign(spec.delays.size() * spec.scales.size(), std::nullopt);

  std::size_t done = 0;
  for (std::size_t i = 0; i < spec.delays.size(); ++i) {
    for (std::size_t j = 0; j < spec.scales.size(); ++j) {
      LambdaSystem system = spec.system;
      system.rabi_pump *= spec.scales[j];
      system.rabi_stokes *= spec.scales[j];
      SequenceSpec shape = sequence_for(system, spec.shape);
      shape.delay = spec.delays[i];
      std::optional<double> eta;
      try {
        eta = ensemble_efficiency(build_sequence(shape), system, members, spec.spatial,
                                  spec.settings);
      } catch (const std::exception& e) {
        std::ostringstream os;
        os << "tau_s=" << spec.delays[i] << " omega_scale=" << spec.scales[j] << ": " << e.what();
        map.diagnostics.push_back(os.str());
      }
      map.efficiency[i * spec.scales.size() + j] = eta;
      ++done;
      if (progress) {
        progress(SweepProgress{done, map.efficiency.size(), spec.delays[i], spec.scales[j], eta});
      }
    }
  }
  return map;
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace cstirap
