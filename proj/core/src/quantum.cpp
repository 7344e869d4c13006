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

#include "cstirap/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cstirap {

namespace {

constexpr Complex kI{0.0, 1.0};

bool all_finite(const DriveValues& d) {
  return std::isfinite(d.rabi_pump) && std::isfinite(d.rabi_stokes) &&
         std::isfinite(d.phase_pump) && std::isfinite(d.phase_stokes) &&
         std::isfinite(d.detuning_pump) && std::isfinite(d.detuning_stokes);
}

template <typename Derived>
bool is_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.derived().data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

// One classical RK4 step for dy/dt = f(t, y).
template <typename State, typename Rhs>
State rk4_step(const Rhs& f, double t, const State& y, double dt) {
  const State k1 = f(t, y);
  const State k2 = f(t + 0.5 * dt, State(y + (0.5 * dt) * k1));
  const State k3 = f(t + 0.5 * dt, State(y + (0.5 * dt) * k2));
  const State k4 = f(t + dt, State(y + dt * k3));
  return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

[[noreturn]] void fail(const std::string& what, double t) {
  std::ostringstream os;
  os << what << " at t = " << t << " s";
  throw IntegrationError(os.str());
}

}  // namespace

void DecayModel::validate() const {
  if (!enabled) return;
  if (!(t1_optical_s > 0.0) || !(t2_hyperfine_s > 0.0)) {
    throw std::invalid_argument("decay model requires T1_opt > 0 and T2_hf > 0");
  }
}

double DecayModel::excited_amplitude_rate() const {
  return enabled ? 0.5 / t1_optical_s : 0.0;
}

double DecayModel::coherence_rate() const { return enabled ? 1.0 / t2_hyperfine_s : 0.0; }

void TimeGrid::validate() const {
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || !std::isfinite(dt)) {
    throw std::invalid_argument("time grid must be finite");
  }
  if (!(t_end > t_start)) throw std::invalid_argument("time grid requires t_end > t_start");
  if (!(dt > 0.0)) throw std::invalid_argument("time grid requires dt > 0");
  if ((t_end - t_start) / dt < 10.0) {
    throw std::invalid_argument("time grid must contain at least 10 steps");
  }
}

std::size_t TimeGrid::steps() const {
  return static_cast<std::size_t>(std::ceil((t_end - t_start) / dt - 1e-9));
}

double TimeGrid::step() const { return (t_end - t_start) / static_cast<double>(steps()); }

double TimeGrid::time_at(std::size_t n) const {
  return t_start + static_cast<double>(n) * step();
}

Matrix3 rwa_hamiltonian(const DriveValues& d) {
  if (!all_finite(d)) throw std::invalid_argument("rwa_hamiltonian: non-finite drive value");
  if (d.rabi_pump < 0.0 || d.rabi_stokes < 0.0) {
    throw std::invalid_argument("rwa_hamiltonian: Rabi frequencies must be non-negative");
  }
  const Complex h12 = 0.5 * d.rabi_pump * std::polar(1.0, d.phase_pump);
  const Complex h23 = 0.5 * d.rabi_stokes * std::polar(1.0, -d.phase_stokes);
  Matrix3 h = Matrix3::Zero();
  h(0, 1) = h12;
  h(1, 0) = std::conj(h12);
  h(1, 2) = h23;
  h(2, 1) = std::conj(h23);
  h(1, 1) = d.detuning_pump;
  h(2, 2) = d.detuning_pump - d.detuning_stokes;
  return h;
}

Matrix3 apply_decay(const Matrix3& hamiltonian, const DecayModel& decay) {
  decay.validate();
  Matrix3 h = hamiltonian;
  h(1, 1) -= kI * decay.excited_amplitude_rate();
  return h;
}

StateTrajectory propagate_state(const HamiltonianFn& hamiltonian, const StateVector3& psi0,
                                const TimeGrid& grid, const PropagationOptions& options) {
  grid.validate();
  const std::size_t n = grid.steps();
  const double dt = grid.step();
  const double norm0 = psi0.norm();

  auto rhs = [&](double t, const StateVector3& psi) -> StateVector3 {
    return -kI * (hamiltonian(t) * psi);
  };

  StateTrajectory out;
  StateVector3 psi = psi0;
  auto keep = [&](std::size_t step, const StateVector3& s) {
    if (options.sample_every == 0) return;
    if (step % options.sample_every == 0 || step == n) {
      out.times.push_back(grid.time_at(step));
      out.states.push_back(s);
    }
  };
  keep(0, psi);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = grid.time_at(k);
    psi = rk4_step(rhs, t, psi, dt);
    if (!is_finite(psi)) fail("non-finite state vector", t + dt);
    const double norm = psi.norm();
    if (options.lossless ? std::abs(norm - norm0) > options.drift_tolerance
                         : norm > norm0 + options.drift_tolerance) {
      fail("state norm drift exceeds tolerance", t + dt);
    }
    keep(k + 1, psi);
  }
  out.final_state = psi;
  return out;
}

DensityTrajectory propagate_density(const HamiltonianFn& hamiltonian, const DensityMatrix3& rho0,
                                    const DecayModel& decay, const TimeGrid& grid,
                                    const PropagationOptions& options) {
  grid.validate();
  decay.validate();
  const std::size_t n = grid.steps();
  const double dt = grid.step();
  const double gamma2 = decay.coherence_rate();
  const bool lossless = options.lossless && !decay.enabled;
  const double trace0 = rho0.trace().real();

  auto rhs = [&](double t, const DensityMatrix3& rho) -> DensityMatrix3 {
    const Matrix3 h = apply_decay(hamiltonian(t), decay);
    DensityMatrix3 k = -kI * (h * rho - rho * h.adjoint());
    // Pure dephasing of |1> and |3> (jump operators sqrt(gamma2) |j><j|).
    k(0, 2) -= gamma2 * rho(0, 2);
    k(2, 0) -= gamma2 * rho(2, 0);
    k(0, 1) -= 0.5 * gamma2 * rho(0, 1);
    k(1, 0) -= 0.5 * gamma2 * rho(1, 0);
    k(1, 2) -= 0.5 * gamma2 * rho(1, 2);
    k(2, 1) -= 0.5 * gamma2 * rho(2, 1);
    return k;
  };

  DensityTrajectory out;
  DensityMatrix3 rho = rho0;
  auto keep = [&](std::size_t step, const DensityMatrix3& s) {
    if (options.sample_every == 0) return;
    if (step % options.sample_every == 0 || step == n) {
      out.times.push_back(grid.time_at(step));
      out.states.push_back(s);
    }
  };
  keep(0, rho);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = grid.time_at(k);
    rho = rk4_step(rhs, t, rho, dt);
    if (!is_finite(rho)) fail("non-finite density matrix", t + dt);
    const double tr = rho.trace().real();
    if (lossless ? std::abs(tr - trace0) > options.drift_tolerance
                 : tr > trace0 + options.drift_tolerance) {
      fail("density-matrix trace drift exceeds tolerance", t + dt);
    }
    keep(k + 1, rho);
  }
  out.final_state = rho;
  return out;
}

StateVector2 propagate_two_level(const std::function<Matrix2(double)>& hamiltonian,
                                 const StateVector2& psi0, const TimeGrid& grid,
                                 double drift_tolerance) {
  grid.validate();
  const std::size_t n = grid.steps();
  const double dt = grid.step();
  const double norm0 = psi0.norm();
  auto rhs = [&](double t, const StateVector2& psi) -> StateVector2 {
    return -kI * (hamiltonian(t) * psi);
  };
  StateVector2 psi = psi0;
  for (std::size_t k = 0; k < n; ++k) {
    psi = rk4_step(rhs, grid.time_at(k), psi, dt);
  }
  if (!is_finite(psi) || std::abs(psi.norm() - norm0) > drift_tolerance) {
    fail("two-level norm drift exceeds tolerance", grid.t_end);
  }
  return psi;
}

CouplingSamples sample_couplings(const std::function<DriveValues(double)>& drive,
                                 const TimeGrid& grid) {
  grid.validate();
  const std::size_t n = grid.steps();
  const double half = 0.5 * grid.step();
  CouplingSamples out{grid, {}, {}};
  out.pump.resize(2 * n + 1);
  out.stokes.resize(2 * n + 1);
  for (std::size_t k = 0; k <= 2 * n; ++k) {
    const double t = (k == 2 * n) ? grid.t_end : grid.t_start + static_cast<double>(k) * half;
    const DriveValues d = drive(t);
    out.pump[k] = 0.5 * d.rabi_pump * std::polar(1.0, d.phase_pump);
    out.stokes[k] = 0.5 * d.rabi_stokes * std::polar(1.0, -d.phase_stokes);
  }
  return out;
}

namespace {

constexpr int kLanes = 8;

// Upper triangle of Hermitian rho for kLanes independent atoms, real and
// imaginary parts split so the lane loops vectorize.
struct alignas(64) Batch {
  double r11[kLanes], r22[kLanes], r33[kLanes];
  double x12[kLanes], y12[kLanes];
  double x13[kLanes], y13[kLanes];
  double x23[kLanes], y23[kLanes];
};

// Derivative of the batch for couplings a = (Omega_P/2) e^{i phi_P},
// b = (Omega_S/2) e^{-i phi_S}; see propagate_lambda_density.
struct BatchRhs {
  const double* dp;   // H22 real part (Delta_P) per lane
  const double* h33;  // H33 (Delta_P - Delta_S) per lane
  double gamma;       // 1/(2 T1)
  double gamma2;      // 1/T2

  void operator()(double ar, double ai, double br, double bi, const Batch& p, Batch& k) const {
    const double half2 = 0.5 * gamma2;
    for (int w = 0; w < kLanes; ++w) {
      const double x12 = p.x12[w], y12 = p.y12[w];
      const double x13 = p.x13[w], y13 = p.y13[w];
      const double x23 = p.x23[w], y23 = p.y23[w];
      const double d = p.r22[w] - p.r11[w];
      const double e = p.r33[w] - p.r22[w];
      const double h22 = dp[w], h3 = h33[w], ds = dp[w] - h33[w];

      const double i11 = ai * x12 - ar * y12;
      const double i33 = br * y23 - bi * x23;
      k.r11[w] = 2.0 * i11;
      k.r33[w] = 2.0 * i33;
      k.r22[w] = -2.0 * i11 - 2.0 * i33 - 2.0 * gamma * p.r22[w];

      // -i [a (r22 - r11) - conj(H22) r12 - conj(b) r13] - gamma2/2 r12
      const double z12r = ar * d - (h22 * x12 - gamma * y12) - (br * x13 + bi * y13);
      const double z12i = ai * d - (h22 * y12 + gamma * x12) - (br * y13 - bi * x13);
      k.x12[w] = z12i - half2 * x12;
      k.y12[w] = -z12r - half2 * y12;

      // -i [a r23 - b r12 - H33 r13] - gamma2 r13
      const double z13r = ar * x23 - ai * y23 - br * x12 + bi * y12 - h3 * x13;
      const double z13i = ar * y23 + ai * x23 - br * y12 - bi * x12 - h3 * y13;
      k.x13[w] = z13i - gamma2 * x13;
      k.y13[w] = -z13r - gamma2 * y13;

      // -i [conj(a) r13 + (H22 - H33) r23 + b (r33 - r22)] - gamma2/2 r23
      const double z23r = ar * x13 + ai * y13 + ds * x23 + gamma * y23 + br * e;
      const double z23i = ar * y13 - ai * x13 + ds * y23 - gamma * x23 + bi * e;
      k.x23[w] = z23i - half2 * x23;
      k.y23[w] = -z23r - half2 * y23;
    }
  }
};

// out = p + s * k, lane- and component-wise.
void axpy(const Batch& p, double s, const Batch& k, Batch& out) {
  const double* pp = &p.r11[0];
  const double* kk = &k.r11[0];
  double* oo = &out.r11[0];
  for (int i = 0; i < 9 * kLanes; ++i) oo[i] = pp[i] + s * kk[i];
}

void rk4_combine(Batch& p, double w, const Batch& k1, const Batch& k2, const Batch& k3,
                 const Batch& k4) {
  double* pp = &p.r11[0];
  const double* a = &k1.r11[0];
  const double* b = &k2.r11[0];
  const double* c = &k3.r11[0];
  const double* d = &k4.r11[0];
  for (int i = 0; i < 9 * kLanes; ++i) pp[i] += w * (a[i] + 2.0 * (b[i] + c[i]) + d[i]);
}

void run_batch(const CouplingSamples& couplings, const BatchRhs& f, double rabi_scale, Batch& p) {
  const std::size_t n = couplings.grid.steps();
  const double dt = couplings.grid.step();
  const double h = 0.5 * dt;
  const double w = dt / 6.0;
  const Complex* pump = couplings.pump.data();
  const Complex* stokes = couplings.stokes.data();
  Batch k1, k2, k3, k4, tmp;
  for (std::size_t s = 0; s < n; ++s) {
    const Complex a0 = rabi_scale * pump[2 * s], b0 = rabi_scale * stokes[2 * s];
    const Complex am = rabi_scale * pump[2 * s + 1], bm = rabi_scale * stokes[2 * s + 1];
    const Complex a1 = rabi_scale * pump[2 * s + 2], b1 = rabi_scale * stokes[2 * s + 2];
    f(a0.real(), a0.imag(), b0.real(), b0.imag(), p, k1);
    axpy(p, h, k1, tmp);
    f(am.real(), am.imag(), bm.real(), bm.imag(), tmp, k2);
    axpy(p, h, k2, tmp);
    f(am.real(), am.imag(), bm.real(), bm.imag(), tmp, k3);
    axpy(p, dt, k3, tmp);
    f(a1.real(), a1.imag(), b1.real(), b1.imag(), tmp, k4);
    rk4_combine(p, w, k1, k2, k3, k4);
  }
}

}  // namespace

void propagate_lambda_batch(const CouplingSamples& couplings,
                            std::span<const LambdaDetunings> detunings, const DecayModel& decay,
                            const DensityMatrix3& rho0, double rabi_scale,
                            std::span<DensityMatrix3> out, double drift_tolerance) {
  decay.validate();
  const std::size_t n = couplings.grid.steps();
  if (couplings.pump.size() != 2 * n + 1 || couplings.stokes.size() != 2 * n + 1) {
    throw std::invalid_argument("coupling samples do not match their grid");
  }
  if (out.size() != detunings.size()) {
    throw std::invalid_argument("propagate_lambda_batch: output size mismatch");
  }
  const double trace0 = rho0.trace().real();

  for (std::size_t first = 0; first < detunings.size(); first += kLanes) {
    const std::size_t count = std::min<std::size_t>(kLanes, detunings.size() - first);
    double dp[kLanes], h33[kLanes];
    Batch p;
    for (int w = 0; w < kLanes; ++w) {
      // Idle lanes repeat the last atom; their results are discarded.
      const LambdaDetunings& d = detunings[first + std::min<std::size_t>(w, count - 1)];
      dp[w] = d.pump;
      h33[w] = d.pump - d.stokes;
      p.r11[w] = rho0(0, 0).real();
      p.r22[w] = rho0(1, 1).real();
      p.r33[w] = rho0(2, 2).real();
      p.x12[w] = rho0(0, 1).real();
      p.y12[w] = rho0(0, 1).imag();
      p.x13[w] = rho0(0, 2).real();
      p.y13[w] = rho0(0, 2).imag();
      p.x23[w] = rho0(1, 2).real();
      p.y23[w] = rho0(1, 2).imag();
    }
    const BatchRhs f{dp, h33, decay.excited_amplitude_rate(), decay.coherence_rate()};
    run_batch(couplings, f, rabi_scale, p);

    for (std::size_t w = 0; w < count; ++w) {
      const Complex r12(p.x12[w], p.y12[w]), r13(p.x13[w], p.y13[w]), r23(p.x23[w], p.y23[w]);
      DensityMatrix3 rho;
      rho << p.r11[w], r12, r13, std::conj(r12), p.r22[w], r23, std::conj(r13), std::conj(r23),
          p.r33[w];
      if (!is_finite(rho)) fail("non-finite density matrix", couplings.grid.t_end);
      const double tr = rho.trace().real();
      if (decay.enabled ? tr > trace0 + drift_tolerance
                        : std::abs(tr - trace0) > drift_tolerance) {
        fail("density-matrix trace drift exceeds tolerance", couplings.grid.t_end);
      }
      out[first + w] = rho;
    }
  }
}

DensityMatrix3 propagate_lambda_density(const CouplingSamples& couplings, double detuning_pump,
                                        double detuning_stokes, const DecayModel& decay,
                                        const DensityMatrix3& rho0, double rabi_scale,
                                        double drift_tolerance) {
  const LambdaDetunings d{detuning_pump, detuning_stokes};
  DensityMatrix3 rho;
  propagate_lambda_batch(couplings, std::span(&d, 1), decay, rho0, rabi_scale, std::span(&rho, 1),
                         drift_tolerance);
  return rho;
}

double hermiticity_defect(const Matrix3& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

DensityMatrix3 pure_density(const StateVector3& psi) { return psi * psi.adjoint(); }

StateVector3 basis_state(int level) {
  if (level < 1 || level > 3) throw std::invalid_argument("basis_state: level must be 1, 2 or 3");
  StateVector3 v = StateVector3::Zero();
  v(level - 1) = 1.0;
  return v;
}

}  // namespace cstirap
