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

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "chaoslab/grid.hpp"

namespace chaoslab {

/// sum_i mu_i log(mu_i / nu_i) with 0 log 0 = 0; +infinity when mu is not
/// absolutely continuous with respect to nu. Both must be probability vectors
/// of equal length (entries >= 0, sums 1 +/- 1e-12).
double relative_entropy(const std::vector<double>& mu, const std::vector<double>& nu);

/// Cell quadrature of rho_mu log(rho_mu / rho_nu) on a common grid.
double relative_entropy_grid(const GridDensity& mu, const GridDensity& nu);

/// int |grad rho|^2 / rho with a spectral gradient. Throws InvalidArgument if
/// any value is <= 0.
double fisher_information_grid(const GridDensity& rho);

/// Plug-in KL of the sample histogram against nu on `bins` bins per axis (bin b
/// covers [b/bins, (b+1)/bins)), minus the Miller-Madow term
/// (nonempty_bins - 1) / (2 * sample_count). Points are interleaved.
/// Requires sample_count >= 100 * bins^d.
double binned_kl_estimate(const std::vector<double>& samples, const GridDensity& nu, int bins);

/// Mass of nu in each bin, reading nu as piecewise constant on its cells.
std::vector<double> bin_masses(const GridDensity& nu, int bins);

struct DvReport {
  double lhs = 0.0;          // -log mu(A)
  double scan_min = 0.0;     // min of H(nu | mu) over the simplex grid
  double refined = 0.0;      // H(mu_A | mu), mu_A = mu conditioned on A
  double rhs = 0.0;          // min(scan_min, refined)
  double gap = 0.0;          // |lhs - rhs|
  std::vector<double> minimizer;
};

/// Thrown by dv_check when mu(A) = 0, where -log mu(A) is infinite.
class InfiniteLhs : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Brute-force check of -log mu(A) = inf { H(nu | mu) : nu(A) = 1 } on a
/// finite space of at most 4 states. A holds 0-based indices. The scan visits
/// every nu supported in A with coordinates in (1/grid_steps) Z.
DvReport dv_check(const std::vector<double>& mu, const std::vector<std::size_t>& subset,
                  int grid_steps);

}  // namespace chaoslab
