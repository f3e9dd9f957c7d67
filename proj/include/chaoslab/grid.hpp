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
#include <iosfwd>
#include <string>
#include <vector>

#include "chaoslab/torus.hpp"

namespace chaoslab {

/// Probability density sampled on the uniform periodic n^d grid.
///
/// Node (i0, i1) sits at (i0/n, i1/n); values are row-major with the first
/// coordinate slowest. Wherever a density is integrated, sampled, or compared
/// with atoms it is read as piecewise constant on the cells
/// [(i - 1/2)/n, (i + 1/2)/n), so cell quadrature and the sampling law agree.
struct GridDensity {
  int dim = 1;
  int n = 0;
  std::vector<double> values;
  double time = 0.0;

  std::size_t size() const { return values.size(); }
  double cell_volume() const;

  /// Cell quadrature of the values.
  double mass() const;
  double min() const;
  double max() const;

  /// Coordinates of node `index`.
  Vec node(std::size_t index) const;

  /// Throws InvalidArgument unless the shape is consistent, values are finite
  /// and >= -1e-12, and the mass is 1 +/- 1e-10.
  void validate() const;
};

/// Zero-filled grid of the right shape (not a density until filled).
GridDensity make_grid(int dim, int n);

GridDensity uniform_density(int dim, int n);

/// 1 + a cos(2 pi m x1), normalized by construction for m >= 1, |a| <= 1.
GridDensity cosine_density(int dim, int n, double amplitude, int wavenumber);

/// Named initial densities for configs.
struct DensitySpec {
  std::string kind = "cosine";  // uniform | cosine | file
  double amplitude = 0.5;
  int wavenumber = 1;
  std::string path;  // kind == file: a grid checkpoint CSV
};

GridDensity make_density(const DensitySpec& spec, int dim, int n);

/// Heat flow of the density at time t when it is known in closed form (uniform
/// or a single cosine mode). Throws InvalidArgument for file densities.
GridDensity heat_flow(const DensitySpec& spec, int dim, int n, double t);

/// Cell containing coordinate x on an n-cell axis (cells centered on nodes).
inline int cell_of(double x, int n) {
  int c = static_cast<int>(std::floor(x * n + 0.5));
  c %= n;
  return c < 0 ? c + n : c;
}

/// Empirical histogram density of interleaved points (x_i at coords[i*dim..]).
GridDensity histogram_density(const std::vector<double>& coords, int dim, int n);

/// Checkpoint CSV: "# chaoslab-grid d=<d> n=<n> time=<t>", then n rows; each
/// row holds n values (d = 2) or one value (d = 1), 17 significant digits.
void write_grid_csv(std::ostream& out, const GridDensity& g);
void write_grid_csv(const std::string& path, const GridDensity& g);
GridDensity read_grid_csv(std::istream& in);
GridDensity read_grid_csv(const std::string& path);

}  // namespace chaoslab
