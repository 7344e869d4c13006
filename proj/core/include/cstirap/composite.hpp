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

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cstirap/pulses.hpp"
#include "cstirap/quantum.hpp"

namespace cstirap {

/// Single-pulse two-level propagator
///   [[ eps e^{i alpha},            sqrt(1-eps^2) e^{i beta} ],
///    [ -sqrt(1-eps^2) e^{-i beta}, eps e^{-i alpha}         ]]
struct SU2Propagator {
  double epsilon = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

Matrix2 su2_matrix(const SU2Propagator& p);

/// A constant phase phi on the coupling shifts beta by phi.
SU2Propagator with_phase(const SU2Propagator& p, double phi);

struct PhaseSet {
  std::vector<double> phases;

  bool symmetric(double tol = 1e-12) const;
  bool gauge_fixed(double tol = 1e-12) const;  // phases[0] == 0

  static PhaseSet from_family(Family family);
  /// (0, phi2, phi3, phi2, 0)
  static PhaseSet symmetric_five(double phi2, double phi3);
};

/// U(phi_N) ... U(phi_2) U(phi_1) for identical constituent pulses.
Matrix2 compose(const SU2Propagator& p, std::span<const double> phases);

/// 1 - |U11|^2
double transition_probability(const Matrix2& u);
/// |U11|^2, computed directly so tiny infidelities keep their precision.
double infidelity(const Matrix2& u);

/// Coefficient of eps in U11 of the symmetric five-pulse sequence
/// (0, phi2, phi3, phi2, 0):
///   [1 + 2 cos(2 phi2 - phi3)] e^{i alpha} + 2 cos(phi2 - phi3) e^{-i alpha}
Complex first_order_coefficient(double phi2, double phi3, double alpha);

struct U5Solution {
  double phi2 = 0.0;
  double phi3 = 0.0;
  double residual = 0.0;  // max of the two real conditions at the root
  std::string label;      // "U5a", "U5b", or "U5a*"/"U5b*" for the phi -> -phi mirrors

  PhaseSet phase_set() const { return PhaseSet::symmetric_five(phi2, phi3); }
};

/// All (phi2, phi3) in [0, 2 pi)^2 with 1 + 2 cos(2 phi2 - phi3) = 0 and
/// cos(phi2 - phi3) = 0. Grid seeds at `seed_resolution` are refined by
/// Newton iteration to `tolerance`; duplicates are merged. Sorted by phi2.
std::vector<U5Solution> solve_u5_phases(double tolerance = 1e-12,
                                        double seed_resolution = 1e-3);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> epsilons;
  std::vector<double> worst_infidelity;
};

class DegenerateFit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Worst-case |U11^(N)|^2 over alpha/beta samples (uniform on [0, 2 pi)) for
/// each eps, then a least-squares line through log(infidelity) vs log(eps).
/// Points whose worst infidelity is zero are skipped; throws DegenerateFit
/// when every point is below 1e-14 or fewer than two points remain.
ScalingFit infidelity_scaling(std::span<const double> phases, std::span<const double> epsilons,
                              int alpha_samples = 8, int beta_samples = 8);

std::vector<double> log_spaced(double lo, double hi, int count);

}  // namespace cstirap
