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

#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "chaoslab/grid.hpp"
#include "chaoslab/kernels.hpp"
#include "chaoslab/spectral.hpp"

namespace chaoslab {

/// Vector field sampled on a grid; component a is field[a] (n^d values).
using GridField = std::vector<std::vector<double>>;

/// K * rho on rho's grid by spectral multiplication. Throws InvalidArgument
/// when n < 2 * M + 2 for the kernel's largest wavenumber M.
GridField convolve_kernel(const Kernel& kernel, const GridDensity& rho);

/// Diagnostics accumulated over steps.
struct SolverStats {
  std::size_t steps = 0;
  std::size_t clamp_events = 0;   // values in (-1e-12, 0) set to 0
  std::size_t renormalizations = 0;
  std::size_t cfl_warnings = 0;   // dt > 0.5 / (n max|u|); advisory only
  double min_value = 0.0;         // running inf_x rho over all visited states
  double max_value = 0.0;
  double max_mass_error = 0.0;    // max |mass - 1| after any step
};

/// Pseudo-spectral solver for
///   d_t rho + div(rho (F + K * rho)) - Laplacian rho = 0
/// with integrating-factor Euler steps:
///   rho_hat <- e^{-|2 pi k|^2 dt} (rho_hat - dt * div(rho u)_hat).
/// Inputs to the product rho * u and the product itself are truncated by the
/// 2/3 rule. Grid and plans are fixed at construction; one instance per thread.
class MeanFieldSolver {
 public:
  MeanFieldSolver(const Kernel& kernel, const Drift& drift, int dim, int n);

  /// Advances rho by dt in place. Throws NumericalFailure on non-finite values
  /// or values below -1e-12.
  void step(GridDensity& rho, double dt);

  const SolverStats& stats() const { return stats_; }

  /// Velocity F + K * rho on the grid, for diagnostics.
  GridField velocity(const GridDensity& rho);

 private:
  void transform(const GridDensity& rho);
  void build_velocity();

  int dim_;
  int n_;
  bool passive_;  // K = 0 and F = 0: pure heat flow
  Fft fft_;
  std::vector<std::array<Complex, 2>> kernel_hat_;  // per spectral index
  GridField drift_grid_;
  std::vector<double> k2_;       // |2 pi k|^2 per spectral index
  std::vector<unsigned char> keep_;  // 2/3-rule mask
  std::vector<Complex> rho_hat_;
  std::vector<Complex> work_hat_;
  std::vector<double> rho_lo_;   // dealiased rho on the grid
  GridField u_;
  std::vector<double> product_;
  SolverStats stats_;
};

/// One step from a copy of rho; see MeanFieldSolver::step.
GridDensity step_pde(const GridDensity& rho, const Kernel& kernel, const Drift& drift, double dt);

struct PdeTrajectory {
  std::vector<GridDensity> checkpoints;  // in increasing time; always ends at T
  SolverStats stats;
};

/// Integrates from rho0 to T with round(T/dt) steps, recording the states
/// closest to each requested checkpoint time and at T.
PdeTrajectory solve_pde(const GridDensity& rho0, const Kernel& kernel, const Drift& drift,
                        double horizon, double dt, const std::vector<double>& checkpoint_times = {});

}  // namespace chaoslab
