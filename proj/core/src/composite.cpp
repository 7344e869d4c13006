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

#include "cstirap/composite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cstirap {

using std::numbers::pi;

namespace {

double wrap_2pi(double x) {
  double r = std::fmod(x, 2 * pi);
  if (r < 0) r += 2 * pi;
  if (r >= 2 * pi) r = 0.0;
  return r;
}

double circular_distance(double a, double b) {
  const double d = std::abs(wrap_2pi(a) - wrap_2pi(b));
  return std::min(d, 2 * pi - d);
}

// The two real conditions that make the first-order coefficient vanish for
// every alpha.
struct Conditions {
  double g1, g2;
};

Conditions conditions(double phi2, double phi3) {
  return {1.0 + 2.0 * std::cos(2 * phi2 - phi3), 2.0 * std::cos(phi2 - phi3)};
}

}  // namespace

Matrix2 su2_matrix(const SU2Propagator& p) {
  if (!(p.epsilon >= 0.0 && p.epsilon <= 1.0)) {
    throw std::invalid_argument("su2_matrix: epsilon must lie in [0, 1]");
  }
  const double s = std::sqrt(1.0 - p.epsilon * p.epsilon);
  Matrix2 u;
  u << p.epsilon * std::polar(1.0, p.alpha), s * std::polar(1.0, p.beta),
      -s * std::polar(1.0, -p.beta), p.epsilon * std::polar(1.0, -p.alpha);
  return u;
}

SU2Propagator with_phase(const SU2Propagator& p, double phi) {
  return SU2Propagator{p.epsilon, p.alpha, p.beta + phi};
}

bool PhaseSet::symmetric(double tol) const {
  const std::size_t n = phases.size();
  for (std::size_t k = 0; k < n / 2; ++k) {
    if (circular_distance(phases[k], phases[n - 1 - k]) > tol) return false;
  }
  return true;
}

bool PhaseSet::gauge_fixed(double tol) const {
  return !phases.empty() && circular_distance(phases.front(), 0.0) <= tol;
}

PhaseSet PhaseSet::from_family(Family family) {
  if (family == Family::Repeat) throw std::invalid_argument("REPEAT has no fixed phase set");
  return PhaseSet{phase_table(family).pump};
}

PhaseSet PhaseSet::symmetric_five(double phi2, double phi3) {
  return PhaseSet{{0.0, phi2, phi3, phi2, 0.0}};
}

Matrix2 compose(const SU2Propagator& p, std::span<const double> phases) {
  Matrix2 total = Matrix2::Identity();
  for (double phi : phases) total = su2_matrix(with_phase(p, phi)) * total;
  return total;
}

double transition_probability(const Matrix2& u) { return 1.0 - std::norm(u(0, 0)); }

double infidelity(const Matrix2& u) { return std::norm(u(0, 0)); }

Complex first_order_coefficient(double phi2, double phi3, double alpha) {
  const Conditions c = conditions(phi2, phi3);
  return c.g1 * std::polar(1.0, alpha) + c.g2 * std::polar(1.0, -alpha);
}

std::vector<U5Solution> solve_u5_phases(double tolerance, double seed_resolution) {
  if (!(seed_resolution > 0.0)) throw std::invalid_argument("seed resolution must be positive");
  const auto n = static_cast<std::size_t>(std::ceil(2 * pi / seed_resolution));
  const double h = 2 * pi / static_cast<double>(n);
  // Both conditions have gradient magnitude at most 4, so a root lies within
  // one grid cell of any seed passing this bound.
  const double seed_bound = 4.0 * std::sqrt(2.0) * h;

  std::vector<U5Solution> roots;
  auto known = [&](double a, double b) {
    return std::any_of(roots.begin(), roots.end(), [&](const U5Solution& r) {
      return circular_distance(r.phi2, a) < 1e-6 && circular_distance(r.phi3, b) < 1e-6;
    });
  };

  for (std::size_t i = 0; i < n; ++i) {
    const double a0 = static_cast<double>(i) * h;
    for (std::size_t j = 0; j < n; ++j) {
      const double b0 = static_cast<double>(j) * h;
      const Conditions c0 = conditions(a0, b0);
      if (std::max(std::abs(c0.g1), std::abs(c0.g2)) > seed_bound) continue;
      if (known(a0, b0)) continue;

      // Newton on (g1, g2) with the analytic Jacobian.
      double a = a0, b = b0;
      bool converged = false;
      for (int it = 0; it < 50; ++it) {
        const Conditions c = conditions(a, b);
        if (std::max(std::abs(c.g1), std::abs(c.g2)) <= tolerance) {
          converged = true;
          break;
        }
        const double s1 = std::sin(2 * a - b), s2 = std::sin(a - b);
        const double j11 = -4.0 * s1, j12 = 2.0 * s1;
        const double j21 = -2.0 * s2, j22 = 2.0 * s2;
        const double det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-14) break;
        a -= (j22 * c.g1 - j12 * c.g2) / det;
        b -= (-j21 * c.g1 + j11 * c.g2) / det;
      }
      if (!converged) continue;
      a = wrap_2pi(a);
      b = wrap_2pi(b);
      if (known(a, b)) continue;
      const Conditions c = conditions(a, b);
      U5Solution s{a, b, std::max(std::abs(c.g1), std::abs(c.g2)), {}};
      const auto near = [&](double p2, double p3) {
        return circular_distance(a, p2) < 1e-6 && circular_distance(b, p3) < 1e-6;
      };
      if (near(5 * pi / 6, pi / 3)) s.label = "U5a";
      else if (near(11 * pi / 6, pi / 3)) s.label = "U5b";
      else if (near(-5 * pi / 6, -pi / 3)) s.label = "U5a*";
      else if (near(-11 * pi / 6, -pi / 3)) s.label = "U5b*";
      roots.push_back(s);
    }
  }
  std::sort(roots.begin(), roots.end(),
            [](const U5Solution& l, const U5Solution& r) { return l.phi2 < r.phi2; });
  return roots;
}

ScalingFit infidelity_scaling(std::span<const double> phases, std::span<const double> epsilons,
                              int alpha_samples, int beta_samples) {
  if (alpha_samples < 1 || beta_samples < 1) {
    throw std::invalid_argument("infidelity_scaling: need at least one alpha and beta sample");
  }
  ScalingFit fit;
  for (double eps : epsilons) {
    double worst = 0.0;
    for (int ia = 0; ia < alpha_samples; ++ia) {
      for (int ib = 0; ib < beta_samples; ++ib) {
        const SU2Propagator p{eps, 2 * pi * ia / alpha_samples, 2 * pi * ib / beta_samples};
        worst = std::max(worst, infidelity(compose(p, phases)));
      }
    }
    fit.epsilons.push_back(eps);
    fit.worst_infidelity.push_back(worst);
  }

  const bool all_tiny = std::all_of(fit.worst_infidelity.begin(), fit.worst_infidelity.end(),
                                    [](double v) { return v < 1e-14; });
  if (all_tiny) throw DegenerateFit("infidelity_scaling: all infidelities below 1e-14");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < fit.epsilons.size(); ++i) {
    if (!(fit.worst_infidelity[i] > 0.0) || !(fit.epsilons[i] > 0.0)) continue;
    const double x = std::log(fit.epsilons[i]);
    const double y = std::log(fit.worst_infidelity[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw DegenerateFit("infidelity_scaling: fewer than two usable points");
  const double denom = m * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) throw DegenerateFit("infidelity_scaling: epsilons coincide");
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  return fit;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (count < 2 || !(lo > 0.0) || !(hi > lo)) {
    throw std::invalid_argument("log_spaced: need 0 < lo < hi and count >= 2");
  }
  std::vector<double> v;
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) v.push_back(std::exp(a + (b - a) * i / (count - 1)));
  return v;
}

}  // namespace cstirap
