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
#include <string>
#include <string_view>
#include <vector>

#include "chaoslab/torus.hpp"
#include "chaoslab/trig_series.hpp"

namespace chaoslab {

enum class KernelFamily { zero, smooth_trig, biot_savart_2d, gradient_of_potential };

std::string_view family_name(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

/// Interaction kernel K descriptor.
///
///   zero                   K = 0
///   smooth_trig            K_a(x) = sum_m A_m sin(2 pi m x_a), A_m from `amplitudes`
///                          (or the single `amplitude` at m = 1)
///   biot_savart_2d         spectral vortex kernel, K_hat(k) = -amp (2 pi i k)^perp / |2 pi k|^2
///                          on 0 < |k|_inf <= m_trunc; tends to amp x^perp / (2 pi |x|^2)
///                          near 0, with x^perp = (-x2, x1)
///   gradient_of_potential  K = -grad W, W(x) = amp sum_a cos(2 pi m x_a), m = wavenumber
///
/// delta > 0 selects the mollified kernel K * rho_delta.
struct KernelSpec {
  KernelFamily family = KernelFamily::zero;
  int dim = 1;
  double amplitude = 1.0;
  std::vector<double> amplitudes;
  int m_trunc = 64;
  int wavenumber = 1;
  double delta = 0.0;
};

/// Immutable kernel: validated spec plus its trigonometric series.
class Kernel {
 public:
  Kernel() : Kernel(KernelSpec{}) {}
  explicit Kernel(KernelSpec spec);

  const KernelSpec& spec() const { return spec_; }
  const TrigSeries& series() const { return series_; }
  int dim() const { return spec_.dim; }

 private:
  KernelSpec spec_;
  TrigSeries series_;
};

/// K(x) for a torus point (or displacement); uses K_delta when delta > 0.
Vec eval_kernel(const Kernel& kernel, const TorusPoint& x);
Vec eval_kernel(const Kernel& kernel, const Vec& x);

/// Kernel evaluating K * rho_delta with the periodized Gaussian mollifier.
/// Mollifying an already mollified kernel composes the widths in quadrature.
Kernel mollify(const Kernel& kernel, double delta);

/// d x d matrix, row-major.
struct Mat {
  int dim = 1;
  std::array<double, 4> a{0.0, 0.0, 0.0, 0.0};

  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * 2 + j)]; }
  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * 2 + j)]; }
  double frobenius() const;
};

/// Matrix field V with K = div V, K_i = sum_j d_j V_ij. Built mode by mode:
/// V_hat(k) = K_hat(k) (x) (-2 pi i k) / |2 pi k|^2, V_hat(0) = 0.
class PrimitiveMatrix {
 public:
  struct Mode {
    WaveVector k;
    Mat sin_coef;
    Mat cos_coef;
  };

  PrimitiveMatrix(int dim, std::vector<Mode> modes) : dim_(dim), modes_(std::move(modes)) {}

  int dim() const { return dim_; }
  const std::vector<Mode>& modes() const { return modes_; }

  Mat eval(const Vec& x) const;

  /// Complex coefficient V_hat_ij(k) for k in the stored half space or its negative.
  std::array<std::complex<double>, 4> coefficient(WaveVector k) const;

  /// Row i of V as a vector-valued series in j.
  TrigSeries row_series(int i) const;

 private:
  int dim_;
  std::vector<Mode> modes_;
};

/// Throws InvalidArgument when K has a nonzero mean (no bounded primitive).
PrimitiveMatrix primitive_matrix(const Kernel& kernel);

/// max over the uniform grid of the Frobenius norm of V; an upper bound for
/// the W^{-1,inf} norm of K attained by this particular V. resolution >= 16.
double wminus_norm_surrogate(const PrimitiveMatrix& v, int resolution);

enum class DriftFamily { zero, constant, trig_potential };

std::string_view family_name(DriftFamily family);
DriftFamily parse_drift_family(std::string_view name);

/// Confinement drift F.
///   zero            F = 0
///   constant        F = value
///   trig_potential  F = -grad U, U(x) = amp sum_a cos(2 pi m x_a)
struct DriftSpec {
  DriftFamily family = DriftFamily::zero;
  int dim = 1;
  Vec value;
  double amplitude = 0.0;
  int wavenumber = 1;
};

class Drift {
 public:
  Drift() : Drift(DriftSpec{}) {}
  explicit Drift(DriftSpec spec);

  const DriftSpec& spec() const { return spec_; }
  const TrigSeries& series() const { return series_; }
  int dim() const { return spec_.dim; }

 private:
  DriftSpec spec_;
  TrigSeries series_;
};

}  // namespace chaoslab
