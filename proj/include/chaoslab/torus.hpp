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
#include <cmath>
#include <span>

namespace chaoslab {

/// Small real vector with d in {1, 2}. Unused trailing components stay 0.
struct Vec {
  int dim = 1;
  std::array<double, 2> c{0.0, 0.0};

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  double norm() const { return std::sqrt(c[0] * c[0] + c[1] * c[1]); }

  static Vec zeros(int dim) { return Vec{dim, {0.0, 0.0}}; }
};

inline Vec operator-(const Vec& v) { return Vec{v.dim, {-v.c[0], -v.c[1]}}; }
inline Vec operator+(const Vec& a, const Vec& b) {
  return Vec{a.dim, {a.c[0] + b.c[0], a.c[1] + b.c[1]}};
}
inline Vec operator*(double s, const Vec& v) { return Vec{v.dim, {s * v.c[0], s * v.c[1]}}; }

/// Canonical representative of a real number modulo 1, in [0, 1).
inline double wrap_coordinate(double x) {
  double r = x - std::floor(x);
  // x = -1e-20 gives r = 1.0 after rounding.
  return r >= 1.0 ? 0.0 : r;
}

/// Representative of a coordinate difference in [-1/2, 1/2). Exactly 1/2 maps to -1/2.
inline double min_image(double dx) { return dx - std::floor(dx + 0.5); }

/// A point of the flat torus [0,1)^d, d in {1, 2}.
class TorusPoint {
 public:
  TorusPoint() = default;

  /// Reduces v modulo 1 componentwise. Throws InvalidArgument on non-finite input
  /// or unsupported dimension.
  static TorusPoint wrap(std::span<const double> v);
  static TorusPoint wrap(const Vec& v);

  int dim() const { return coords_.dim; }
  double operator[](int i) const { return coords_[i]; }
  const Vec& coords() const { return coords_; }

 private:
  Vec coords_;
};

/// Unique representative of x - y with every coordinate in [-1/2, 1/2).
Vec min_displacement(const TorusPoint& x, const TorusPoint& y);

/// Geodesic distance, the Euclidean norm of min_displacement. At most sqrt(d)/2.
double torus_distance(const TorusPoint& x, const TorusPoint& y);

/// Squared geodesic distance from raw coordinates (no validation, hot loops).
inline double torus_distance_sq(const double* x, const double* y, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) {
    double dx = min_image(x[a] - y[a]);
    s += dx * dx;
  }
  return s;
}

}  // namespace chaoslab
