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
#include <benchmark/benchmark.h>

#include <vector>

#include "cstirap/composite.hpp"
#include "cstirap/ensemble.hpp"

namespace {

using namespace cstirap;

CompositeSequence u5b_sequence() {
  SequenceSpec s;
  s.family = Family::U5b;
  s.n_pairs = 5;
  s.delay = 6e-6;
  s.fwhm = 14e-6;
  s.peak_pump = angular(640e3);
  s.peak_stokes = angular(550e3);
  s.repeat_style = RepeatStyle::NonAlternating;
  return build_sequence(s);
}

// One 64-atom chunk of the ensemble sweep, at the production step size.
void BM_LambdaBatch(benchmark::State& state) {
  const CompositeSequence seq = u5b_sequence();
  const CouplingSamples c = sample_couplings(
      [&](double t) { return drive_values(seq, t, 0.0, 0.0); },
      sequence_grid(seq, static_cast<double>(state.range(0))));
  std::vector<LambdaDetunings> det(64);
  for (std::size_t i = 0; i < det.size(); ++i) {
    det[i] = {angular(1.75e6 + 5e3 * static_cast<double>(i)), angular(1.75e6)};
  }
  std::vector<DensityMatrix3> out(det.size());
  const DensityMatrix3 rho0 = pure_density(basis_state(1));
  const DecayModel decay = DecayModel::with(164e-6, 500e-6);
  for (auto _ : state) {
    propagate_lambda_batch(c, det, decay, rho0, 1.0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(det.size()));
}
BENCHMARK(BM_LambdaBatch)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_GenericDensity(benchmark::State& state) {
  const CompositeSequence seq = u5b_sequence();
  const TimeGrid g = sequence_grid(seq, 500.0);
  const DensityMatrix3 rho0 = pure_density(basis_state(1));
  const DecayModel decay = DecayModel::with(164e-6, 500e-6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagate_density(
        [&](double t) { return rwa_hamiltonian(drive_values(seq, t, angular(1.75e6), angular(1.75e6))); },
        rho0, decay, g));
  }
}
BENCHMARK(BM_GenericDensity)->Unit(benchmark::kMillisecond);

void BM_Compose(benchmark::State& state) {
  const std::vector<double> phases = PhaseSet::from_family(Family::U5b).phases;
  const SU2Propagator p{1e-2, 0.3, 1.1};
  for (auto _ : state) benchmark::DoNotOptimize(compose(p, phases));
}
BENCHMARK(BM_Compose);

void BM_InfidelityScaling(benchmark::State& state) {
  const std::vector<double> phases = PhaseSet::from_family(Family::U5a).phases;
  const std::vector<double> eps = log_spaced(1e-3, 1e-2, 10);
  for (auto _ : state) benchmark::DoNotOptimize(infidelity_scaling(phases, eps, 8, 8));
}
BENCHMARK(BM_InfidelityScaling)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
