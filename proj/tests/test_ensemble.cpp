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
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cstirap/ensemble.hpp"

using namespace cstirap;

namespace {

LambdaSystem resonant_system(bool decay = false) {
  LambdaSystem s;
  s.rabi_pump = angular(635e3);
  s.rabi_stokes = angular(510e3);
  if (decay) s.decay = DecayModel::with(164e-6, 500e-6);
  return s;
}

CompositeSequence resonant_pair(const LambdaSystem& sys, double delay) {
  SequenceSpec s;
  s.delay = delay;
  s.fwhm = 17e-6;
  return build_sequence(sequence_for(sys, s));
}

EnsembleSpec small_ensemble() {
  EnsembleSpec e;
  e.optical = DetuningGrid{100e3, 50e3};
  e.hyperfine = DetuningGrid{20e3, 10e3};
  return e;
}

const SimulationSettings kCoarse{500.0, 1};

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("default ensemble has 961 normalized members") {
  const std::vector<EnsembleMember> m = ensemble_members(EnsembleSpec{});
  REQUIRE(m.size() == 961);
  double total = 0.0;
  for (const EnsembleMember& x : m) total += x.weight;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  // Optical outer, hyperfine inner; the centre member is index 15 * 31 + 15.
  const EnsembleMember& centre = m[15 * 31 + 15];
  CHECK(centre.optical_offset == 0.0);
  CHECK(centre.two_photon_offset == 0.0);
  CHECK(std::max_element(m.begin(), m.end(), [](auto& a, auto& b) { return a.weight < b.weight; })
            ->weight == centre.weight);
  // +100 kHz optical is half the optical FWHM: Gaussian weight ratio 1/2.
  CHECK(m[20 * 31 + 15].optical_offset == doctest::Approx(angular(100e3)));
  CHECK(m[20 * 31 + 15].weight / centre.weight == doctest::Approx(0.5));
  // +15 kHz hyperfine is off-grid; +16 kHz gives exp(-4 ln2 (16/30)^2).
  CHECK(m[15 * 31 + 19].two_photon_offset == doctest::Approx(angular(16e3)));
  CHECK(m[15 * 31 + 19].weight / centre.weight ==
        doctest::Approx(std::exp(-4.0 * std::numbers::ln2 * (16.0 / 30.0) * (16.0 / 30.0))));
}

TEST_CASE("flat and single-point limits") {
  EnsembleSpec flat;
  flat.optical_fwhm_hz = INFINITY;
  flat.hyperfine_fwhm_hz = INFINITY;
  for (const EnsembleMember& m : ensemble_members(flat)) {
    CHECK(m.weight == doctest::Approx(1.0 / 961.0));
  }
  const std::vector<EnsembleMember> one = ensemble_members(EnsembleSpec::homogeneous());
  REQUIRE(one.size() == 1);
  CHECK(one[0].weight == 1.0);
  EnsembleSpec narrow;
  narrow.optical_fwhm_hz = 1e-30;
  narrow.hyperfine_fwhm_hz = 1e-30;
  // Every off-centre weight underflows; the centre member carries everything.
  const std::vector<EnsembleMember> m = ensemble_members(narrow);
  CHECK(m[15 * 31 + 15].weight == 1.0);
  CHECK_THROWS_AS(ensemble_members(EnsembleSpec{0.0, 30e3}), std::invalid_argument);
  CHECK_THROWS_AS(ensemble_members(EnsembleSpec{-5.0, 30e3}), std::invalid_argument);
}

TEST_CASE("one-member ensemble equals the member efficiency") {
  const LambdaSystem sys = resonant_system(true);
  const CompositeSequence seq = resonant_pair(sys, 5e-6);
  const double single = transfer_efficiency(seq, sys, EnsembleMember{}, kCoarse);
  const double ens = ensemble_efficiency(seq, sys, EnsembleSpec::homogeneous(),
                                         SpatialAveragingSpec::disabled(), kCoarse);
  CHECK(ens == single);
}

TEST_CASE("zero drive transfers nothing") {
  LambdaSystem sys;
  const CompositeSequence seq = resonant_pair(sys, 5e-6);
  CHECK(transfer_efficiency(seq, sys, EnsembleMember{}, kCoarse) == 0.0);
}

TEST_CASE("resonant STIRAP without broadening or decay") {
  const LambdaSystem sys = resonant_system();
  CHECK(transfer_efficiency(resonant_pair(sys, 10e-6), sys, EnsembleMember{}) > 0.99);

  // At 5 us the fields already overlap at the slot edges, so the dark state
  // starts and ends tilted away from |1> and |3>. Sudden projection at both
  // edges gives cos^2(theta_0) sin^2(theta_end); non-adiabatic loss in between
  // takes a further 0.7 %.
  const double fwhm = 17e-6, delay = 5e-6, c = 4.0 * std::log(2.0);
  const double start = 1.5 * fwhm, lag = (std::pow(start + delay, 2) - start * start) / (fwhm * fwhm);
  const double tan0 = (635.0 / 510.0) * std::exp(-c * lag);
  const double tan_end = (635.0 / 510.0) * std::exp(c * lag);
  const double projection = 1.0 / (1.0 + tan0 * tan0) * tan_end * tan_end / (1.0 + tan_end * tan_end);
  const double eta = transfer_efficiency(resonant_pair(sys, delay), sys, EnsembleMember{});
  CHECK(projection == doctest::Approx(0.98993).epsilon(1e-4));
  CHECK(eta <= projection);
  CHECK(eta > projection - 0.01);
}

TEST_CASE("efficiencies stay in [0, 1]") {
  const LambdaSystem sys = resonant_system(true);
  for (double delay : {-8e-6, 0.0, 3e-6}) {
    const CompositeSequence seq = resonant_pair(sys, delay);
    for (const EnsembleMember& m : ensemble_members(small_ensemble())) {
      const double eta = transfer_efficiency(seq, sys, m, kCoarse);
      CHECK(eta >= -1e-9);
      CHECK(eta <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("ensemble average is linear in the weights") {
  const LambdaSystem sys = resonant_system(true);
  const CompositeSequence seq = resonant_pair(sys, 4e-6);
  std::vector<EnsembleMember> members = ensemble_members(small_ensemble());
  const double base =
      ensemble_efficiency(seq, sys, members, SpatialAveragingSpec::disabled(), kCoarse);
  std::vector<EnsembleMember> split = members;
  split[3].weight *= 0.25;
  EnsembleMember copy = members[3];
  copy.weight *= 0.75;
  split.push_back(copy);
  const double after =
      ensemble_efficiency(seq, sys, split, SpatialAveragingSpec::disabled(), kCoarse);
  CHECK(std::abs(after - base) <= 1e-12);
}

TEST_CASE("results do not depend on the thread count") {
  const LambdaSystem sys = resonant_system(true);
  const CompositeSequence seq = resonant_pair(sys, 2e-6);
  const double one = ensemble_efficiency(seq, sys, small_ensemble(),
                                         SpatialAveragingSpec::folded_gaussian(), {500.0, 1});
  const double three = ensemble_efficiency(seq, sys, small_ensemble(),
                                           SpatialAveragingSpec::folded_gaussian(), {500.0, 3});
  CHECK(one == three);
}

TEST_CASE("folded Gaussian spatial rule") {
  const SpatialAveragingSpec s = SpatialAveragingSpec::folded_gaussian(7, 0.15);
  REQUIRE(s.samples.size() == 4);
  CHECK(s.samples[0].scale == doctest::Approx(1.0));
  double w = 0.0, m2 = 0.0, m4 = 0.0;
  const double sigma = 0.15 / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
  for (const SpatialSample& x : s.samples) {
    CHECK(x.scale > 0.0);
    CHECK(x.scale <= 1.0);
    w += x.weight;
    m2 += x.weight * std::pow(1.0 - x.scale, 2);
    m4 += x.weight * std::pow(1.0 - x.scale, 4);
  }
  // Gauss-Hermite with 7 nodes integrates the normal moments exactly.
  CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m2 == doctest::Approx(sigma * sigma).epsilon(1e-12));
  CHECK(m4 == doctest::Approx(3.0 * std::pow(sigma, 4)).epsilon(1e-12));
  CHECK_THROWS_AS(SpatialAveragingSpec::folded_gaussian(0, 0.15), std::invalid_argument);
  CHECK_THROWS_AS(SpatialAveragingSpec::folded_gaussian(7, 3.0), std::invalid_argument);
}

TEST_CASE("spatial averaging washes out intuitive-order oscillations") {
  const LambdaSystem sys = resonant_system();
  auto roughness = [&](const SpatialAveragingSpec& spatial) {
    double prev = 0.0, total = 0.0;
    for (int k = 0; k <= 32; ++k) {
      const double delay = -12e-6 + 0.25e-6 * k;
      const double eta = ensemble_efficiency(resonant_pair(sys, delay), sys,
                                             EnsembleSpec::homogeneous(), spatial, kCoarse);
      if (k > 0) total += std::abs(eta - prev);
      prev = eta;
    }
    return total;
  };
  const double off = roughness(SpatialAveragingSpec::disabled());
  // eta(scale) oscillates with a period below the 15 % spread, so the default
  // 7-point rule only partly resolves the average; a 31-point rule does.
  const double seven = roughness(SpatialAveragingSpec::folded_gaussian(7, 0.15));
  const double fine = roughness(SpatialAveragingSpec::folded_gaussian(31, 0.15));
  CHECK(seven < 0.8 * off);
  CHECK(fine < 0.1 * off);
}

TEST_CASE("two-photon detuning spoils resonant STIRAP") {
  LambdaSystem sys = resonant_system();
  const double on_resonance = transfer_efficiency(resonant_pair(sys, 5e-6), sys, {}, kCoarse);
  sys.two_photon_detuning = angular(60e3);
  const double detuned = transfer_efficiency(resonant_pair(sys, 5e-6), sys, {}, kCoarse);
  CHECK(on_resonance - detuned >= 0.2);
}

TEST_CASE("optical offset shifts both detunings, hyperfine offset only the pump") {
  LambdaSystem sys = resonant_system();
  sys.detuning_stokes = angular(1.75e6);
  const CompositeSequence seq = resonant_pair(sys, 5e-6);
  const DensityMatrix3 a =
      final_density(seq, sys, EnsembleMember{angular(50e3), angular(7e3), 1.0}, kCoarse);
  LambdaSystem shifted = sys;
  shifted.detuning_stokes += angular(50e3);
  shifted.two_photon_detuning += angular(7e3);
  const DensityMatrix3 b = final_density(seq, shifted, EnsembleMember{}, kCoarse);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("probe efficiency formula") {
  CHECK(probe_efficiency(1.0, 1.0, 1.0) == doctest::Approx(0.5));
  CHECK(probe_efficiency(0.0, 1.0, 1.0) == 1.0);
  CHECK(probe_efficiency(3.0, 1.0, 1.0) == doctest::Approx(0.25));
  CHECK(probe_efficiency(1.5, 1.0, 2.0) == doctest::Approx(0.25));
  CHECK(probe_efficiency(1.0, 0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(probe_efficiency(0.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(probe_efficiency(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("simulated probe round-trips to P3 / (P1 + P3)") {
  const ProbeAbsorption a = simulate_probe(0.2, 0.8, 1.0);
  CHECK(probe_efficiency(a.alpha12, a.alpha32, 1.0) == doctest::Approx(0.8));
  const ProbeAbsorption b = simulate_probe(0.4, 0.4, 1.7);
  CHECK(probe_efficiency(b.alpha12, b.alpha32, 1.7) == doctest::Approx(0.5));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double p1 = u(rng), p3 = u(rng) + 1e-6, f = 0.1 + 3.0 * u(rng);
    const ProbeAbsorption x = simulate_probe(p1, p3, f);
    CHECK(std::abs(probe_efficiency(x.alpha12, x.alpha32, f) - p3 / (p1 + p3)) < 1e-12);
  }
  CHECK_THROWS_AS(simulate_probe(0.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(simulate_probe(-0.1, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("sweep fills the grid and records failures as missing") {
  SweepSpec spec;
  spec.system = resonant_system(true);
  spec.shape.fwhm = 17e-6;
  spec.settings = kCoarse;
  spec.delays = {5e-6};
  spec.scales = {1.0};
  const EfficiencyMap one = sweep(spec);
  REQUIRE(one.efficiency.size() == 1);
  CHECK(*one.at(0, 0) == ensemble_efficiency(resonant_pair(spec.system, 5e-6), spec.system,
                                             EnsembleSpec::homogeneous(),
                                             SpatialAveragingSpec::disabled(), kCoarse));

  spec.delays = {-2e-6, 5e-6};
  spec.scales = {1.0, 2000.0};
  std::size_t calls = 0;
  const EfficiencyMap map = sweep(spec, [&](const SweepProgress& p) {
    ++calls;
    CHECK(p.total == 4);
  });
  CHECK(calls == 4);
  CHECK(map.at(0, 0).has_value());
  CHECK(map.at(1, 0).has_value());
  CHECK_FALSE(map.at(0, 1).has_value());
  CHECK_FALSE(map.at(1, 1).has_value());
  CHECK(map.diagnostics.size() == 2);
  CHECK(*map.peak() == std::max(*map.at(0, 0), *map.at(1, 0)));

  spec.scales = {-1.0};
  CHECK_THROWS_AS(sweep(spec), std::invalid_argument);
  spec.scales = {};
  CHECK_THROWS_AS(sweep(spec), std::invalid_argument);
}

}  // TEST_SUITE
