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
#include <vector>

#include "chaoslab/grid.hpp"
#include "chaoslab/particles.hpp"
#include "chaoslab/torus.hpp"

namespace chaoslab {

/// Concentration rate function
///   eps^{2p}                          p > d/2
///   eps^{2p} / log(2 + eps^{-p})^2    p = d/2
///   eps^d                             p < d/2
/// Requires eps > 0, p >= 1, d >= 1.
double rate_a_p(double p, int d, double epsilon);

enum class RateBranch { above, critical, below };
RateBranch rate_branch(double p, int d);

/// Uniformly weighted atoms on T^d; coordinates interleaved (atom i at
/// coords[i*dim .. i*dim + dim)).
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(int dim, std::vector<double> coords);
  static EmpiricalMeasure from_points(const std::vector<TorusPoint>& points);
  static EmpiricalMeasure from_config(const ParticleConfig& config);

  int dim() const { return dim_; }
  std::size_t size() const { return coords_.size() / static_cast<std::size_t>(dim_); }
  const std::vector<double>& coords() const { return coords_; }
  const double* atom(std::size_t i) const { return coords_.data() + i * dim_; }

 private:
  int dim_;
  std::vector<double> coords_;
};

/// Exact p-Wasserstein distance on the circle T^1 with the geodesic metric.
/// Grid densities are read as piecewise constant on their cells.
///
/// The circular problem is reduced to min over a rotation theta of the
/// quantile-coupling cost int_0^1 |Q_mu(t) - Q_nu(t + theta)|^p dt (convex in
/// theta). p = 1 uses the closed form min_a int |F_mu - F_nu - a| (a at the
/// Lebesgue median of F_mu - F_nu); p > 1 minimizes by golden-section search.
/// Throws InvalidArgument unless d = 1 and p >= 1.
double wasserstein_1d(const EmpiricalMeasure& mu, const GridDensity& nu, double p);
double wasserstein_1d(const GridDensity& mu, const GridDensity& nu, double p);
double wasserstein_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p);

/// Minimal-cost perfect matching for a square cost matrix (row-major), O(n^3).
/// Returns the column assigned to each row.
std::vector<std::size_t> hungarian(const std::vector<double>& cost, std::size_t n);

/// Exact d_p between equal-size empirical measures by optimal assignment on the
/// torus_distance^p cost. At most 64 atoms.
double wasserstein_exact_small(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p);

/// Weighted point cloud for entropic OT.
struct WeightedCloud {
  int dim = 1;
  std::vector<double> coords;   // interleaved
  std::vector<double> weights;  // positive, summing to 1

  std::size_t size() const { return weights.size(); }
  static WeightedCloud from_measure(const EmpiricalMeasure& mu);
  /// Grid nodes carrying the cell masses; zero-mass cells are dropped.
  static WeightedCloud from_grid(const GridDensity& rho);
};

struct SinkhornOptions {
  int max_iters = 100000;
  double tolerance = 1e-5;  // L1 violation of the first marginal
};

/// Entropic OT value <a, f> + <b, g> at the converged dual potentials, for cost
/// torus_distance^p and regularization reg (log-domain iterations). Throws
/// NumericalFailure carrying the residual if not converged.
double entropic_ot(const WeightedCloud& a, const WeightedCloud& b, double p, double reg,
                   const SinkhornOptions& options = {});

/// Debiased divergence S = OT(a,b) - OT(a,a)/2 - OT(b,b)/2, returned as
/// max(S, 0)^{1/p}.
double sinkhorn_distance(const WeightedCloud& a, const WeightedCloud& b, double p, double reg,
                         const SinkhornOptions& options = {});

/// d = 2 estimator of d_p(mu, nu) by debiased Sinkhorn.
double wasserstein_sinkhorn(const EmpiricalMeasure& mu, const GridDensity& nu, double p,
                            double reg, const SinkhornOptions& options = {});

/// reg = 0.5 * s^2 with s the mean nearest-neighbour distance between mu's atoms;
/// the same for every p.
double calibrated_reg(const EmpiricalMeasure& mu, double p);

}  // namespace chaoslab
