// Copyright 2026 The chaoslab Authors
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

#include "chaoslab/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "chaoslab/error.hpp"

namespace chaoslab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_resolved(const TrigSeries& series, int n, const char* what) {
  const int m = series.max_wavenumber();
  if (n < 2 * m + 2) {
    throw InvalidArgument(std::string(what) + ": grid n = " + std::to_string(n) +
                          " aliases wavenumber " + std::to_string(m) + " (need n >= 2M + 2)");
  }
}

}  // namespace

GridField convolve_kernel(const Kernel& kernel, const GridDensity& rho) {
  if (kernel.dim() != rho.dim) throw InvalidArgument("convolve_kernel: dimension mismatch");
  require_resolved(kernel.series(), rho.n, "convolve_kernel");
  Fft fft(rho.dim, rho.n);
  std::vector<Complex> rho_hat(fft.spectral_size());
  fft.forward(rho.values, rho_hat);
  GridField out;
  std::vector<Complex> prod(fft.spectral_size());
  for (int a = 0; a < rho.dim; ++a) {
    for (std::size_t i = 0; i < prod.size(); ++i) {
      prod[i] = kernel.series().coefficient(fft.wave_vector(i))[static_cast<std::size_t>(a)] *
                rho_hat[i];
    }
    std::vector<double> field(fft.real_size());
    fft.inverse(prod, field);
    out.push_back(std::move(field));
  }
  return out;
}

MeanFieldSolver::MeanFieldSolver(const Kernel& kernel, const Drift& drift, int dim, int n)
    : dim_(dim), n_(n), fft_(dim, n) {
  if (kernel.dim() != dim || drift.dim() != dim) {
    throw InvalidArgument("mean-field solver: kernel/drift dimension mismatch");
  }
  require_resolved(kernel.series(), n, "mean-field solver");
  require_resolved(drift.series(), n, "mean-field solver");
  passive_ = kernel.series().empty() && drift.series().empty();

  const std::size_t ns = fft_.spectral_size();
  kernel_hat_.resize(ns);
  k2_.resize(ns);
  keep_.resize(ns);
  const int cutoff = n / 3;
  for (std::size_t i = 0; i < ns; ++i) {
    const WaveVector k = fft_.wave_vector(i);
    const ComplexVec c = kernel.series().coefficient(k);
    kernel_hat_[i] = {c[0], c[1]};
    const double kk = static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1];
    k2_[i] = kTwoPi * kTwoPi * kk;
    keep_[i] = std::abs(k[0]) <= cutoff && std::abs(k[1]) <= cutoff;
  }
  drift_grid_ = synthesize(drift.series(), n);

  rho_hat_.resize(ns);
  work_hat_.resize(ns);
  rho_lo_.resize(fft_.real_size());
  product_.resize(fft_.real_size());
  u_.assign(static_cast<std::size_t>(dim), std::vector<double>(fft_.real_size()));
  stats_.min_value = std::numeric_limits<double>::infinity();
  stats_.max_value = -std::numeric_limits<double>::infinity();
}

void MeanFieldSolver::transform(const GridDensity& rho) {
  if (rho.dim != dim_ || rho.n != n_) throw InvalidArgument("mean-field solver: grid mismatch");
  fft_.forward(rho.values, rho_hat_);
}

void MeanFieldSolver::build_velocity() {
  // Dealiased rho, then u_a = F_a + (K_a * rho_lo).
  for (std::size_t i = 0; i < rho_hat_.size(); ++i) work_hat_[i] = keep_[i] ? rho_hat_[i] : 0.0;
  fft_.inverse(work_hat_, rho_lo_);
  for (int a = 0; a < dim_; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    for (std::size_t i = 0; i < rho_hat_.size(); ++i) {
      work_hat_[i] = keep_[i] ? kernel_hat_[i][ua] * rho_hat_[i] : 0.0;
    }
    fft_.inverse(work_hat_, u_[ua]);
    for (std::size_t j = 0; j < u_[ua].size(); ++j) u_[ua][j] += drift_grid_[ua][j];
  }
}

GridField MeanFieldSolver::velocity(const GridDensity& rho) {
  transform(rho);
  build_velocity();
  return u_;
}

void MeanFieldSolver::step(GridDensity& rho, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("step_pde: dt must be > 0");
  transform(rho);
  const std::size_t ns = rho_hat_.size();

  std::vector<Complex> div_hat(ns, Complex(0.0, 0.0));
  if (!passive_) {
    build_velocity();
    double umax = 0.0;
    for (int a = 0; a < dim_; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      for (std::size_t j = 0; j < product_.size(); ++j) {
        product_[j] = rho_lo_[j] * u_[ua][j];
        umax = std::max(umax, std::abs(u_[ua][j]));
      }
      fft_.forward(product_, work_hat_);
      for (std::size_t i = 0; i < ns; ++i) {
        if (!keep_[i]) continue;
        const double ka = fft_.wave_vector(i)[ua];
        div_hat[i] += Complex(0.0, kTwoPi * ka) * work_hat_[i];
      }
    }
    if (umax > 0.0 && dt > 0.5 / (n_ * umax)) ++stats_.cfl_warnings;
  }
  for (std::size_t i = 0; i < ns; ++i) {
    rho_hat_[i] = std::exp(-k2_[i] * dt) * (rho_hat_[i] - dt * div_hat[i]);
  }
  fft_.inverse(rho_hat_, rho.values);

  for (double& v : rho.values) {
    if (!std::isfinite(v)) throw NumericalFailure("mean-field solver: non-finite density (blow-up)");
    if (v < 0.0) {
      if (v < -1e-12) {
        throw NumericalFailure("mean-field solver: density fell to " + std::to_string(v) +
                               " at t = " + std::to_string(rho.time + dt));
      }
      v = 0.0;
      ++stats_.clamp_events;
    }
  }
  double mass = rho.mass();
  if (std::abs(mass - 1.0) > 1e-12) {
    for (double& v : rho.values) v /= mass;
    ++stats_.renormalizations;
  }
  stats_.max_mass_error = std::max(stats_.max_mass_error, std::abs(mass - 1.0));
  stats_.min_value = std::min(stats_.min_value, rho.min());
  stats_.max_value = std::max(stats_.max_value, rho.max());
  rho.time += dt;
  ++stats_.steps;
}

GridDensity step_pde(const GridDensity& rho, const Kernel& kernel, const Drift& drift, double dt) {
  MeanFieldSolver solver(kernel, drift, rho.dim, rho.n);
  GridDensity out = rho;
  solver.step(out, dt);
  return out;
}

PdeTrajectory solve_pde(const GridDensity& rho0, const Kernel& kernel, const Drift& drift,
                        double horizon, double dt, const std::vector<double>& checkpoint_times) {
  rho0.validate();
  if (!(rho0.min() > 0.0)) throw InvalidArgument("solve_pde: inf rho0 must be positive");
  if (!(dt > 0.0) || !(horizon >= dt)) throw InvalidArgument("solve_pde: need 0 < dt <= T");
  const double ratio = horizon / dt;
  const auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * static_cast<double>(steps)) {
    throw InvalidArgument("solve_pde: T / dt must be an integer step count");
  }
  std::vector<std::size_t> marks;
  for (double t : checkpoint_times) {
    if (!(t >= 0.0) || t > horizon * (1.0 + 1e-12)) {
      throw InvalidArgument("solve_pde: checkpoint time outside [0, T]");
    }
    marks.push_back(static_cast<std::size_t>(std::llround(t / dt)));
  }
  marks.push_back(steps);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  MeanFieldSolver solver(kernel, drift, rho0.dim, rho0.n);
  PdeTrajectory traj;
  GridDensity rho = rho0;
  std::size_t next = 0;
  for (std::size_t s = 0; s <= steps; ++s) {
    if (s > 0) solver.step(rho, dt);
    if (next < marks.size() && marks[next] == s) {
      rho.time = static_cast<double>(s) * dt;
      traj.checkpoints.push_back(rho);
      ++next;
    }
  }
  traj.stats = solver.stats();
  traj.stats.min_value = std::min(traj.stats.min_value, rho0.min());
  traj.stats.max_value = std::max(traj.stats.max_value, rho0.max());
  return traj;
}

}  // namespace chaoslab
