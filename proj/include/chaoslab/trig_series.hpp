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
#include <complex>
#include <map>
#include <utility>
#include <vector>

#include "chaoslab/torus.hpp"

namespace chaoslab {

using WaveVector = std::array<int, 2>;
using ComplexVec = std::array<std::complex<double>, 2>;

/// One real Fourier mode: sin_coef * sin(2 pi k.x) + cos_coef * cos(2 pi k.x).
struct TrigMode {
  WaveVector k{0, 0};
  Vec sin_coef;
  Vec cos_coef;
};

/// Finite real trigonometric series on T^d with vector values. Every built-in
/// kernel and drift is one of these; mollification and convolution act on the
/// coefficients directly.
///
/// Modes are stored once per +/- pair with k in the half space
/// {k1 > 0} U {k1 = 0, k2 > 0}, plus optionally k = 0 (a constant).
class TrigSeries {
 public:
  TrigSeries() = default;
  TrigSeries(int dim, const std::vector<TrigMode>& modes);

  int dim() const { return dim_; }
  const std::vector<TrigMode>& modes() const { return modes_; }
  bool empty() const { return modes_.empty(); }

  Vec eval(const Vec& x) const;

  /// Complex Fourier coefficient f_hat(k) with f(x) = sum_k f_hat(k) e^{2 pi i k.x}.
  ComplexVec coefficient(WaveVector k) const;

  /// max over modes of |k|_inf; 0 for an empty or constant series.
  int max_wavenumber() const;

  /// Value of the k = 0 mode (the mean over the torus).
  Vec mean() const;

  /// True when no cosine terms are present, i.e. f(-x) = -f(x).
  bool is_odd() const;

  /// Coefficients multiplied by exp(-|2 pi k|^2 delta^2 / 2), the Fourier
  /// multiplier of the periodized Gaussian at time delta^2 / 2.
  TrigSeries heat_smoothed(double delta) const;

 private:
  int dim_ = 1;
  std::vector<TrigMode> modes_;
  std::map<std::pair<int, int>, std::size_t> index_;
};

/// Canonical half-space representative of k; returns false when k was negated.
bool canonical_wave_vector(WaveVector& k);

}  // namespace chaoslab
