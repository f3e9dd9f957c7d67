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

#include "chaoslab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "chaoslab/error.hpp"
#include "chaoslab/spectral.hpp"

namespace chaoslab {
namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

// -grad of amp * sum_a cos(2 pi m x_a).
std::vector<TrigMode> cosine_potential_gradient(int dim, double amp, int m) {
  std::vector<TrigMode> modes;
  for (int a = 0; a < dim; ++a) {
    TrigMode mode;
    mode.k = {a == 0 ? m : 0, a == 1 ? m : 0};
    mode.sin_coef = Vec::zeros(dim);
    mode.cos_coef = Vec::zeros(dim);
    mode.sin_coef[a] = 2.0 * kPi * m * amp;
    modes.push_back(mode);
  }
  return modes;
}

TrigSeries build_series(const KernelSpec& spec) {
  const int dim = spec.dim;
  std::vector<TrigMode> modes;
  switch (spec.family) {
    case KernelFamily::zero:
      break;
    case KernelFamily::smooth_trig: {
      std::vector<double> amps = spec.amplitudes;
      if (amps.empty()) amps.push_back(spec.amplitude);
      for (std::size_t m = 0; m < amps.size(); ++m) {
        if (amps[m] == 0.0) continue;
        for (int a = 0; a < dim; ++a) {
          const int wave = static_cast<int>(m) + 1;
          TrigMode mode;
          mode.k = {a == 0 ? wave : 0, a == 1 ? wave : 0};
          mode.sin_coef = Vec::zeros(dim);
          mode.cos_coef = Vec::zeros(dim);
          mode.sin_coef[a] = amps[m];
          modes.push_back(mode);
        }
      }
      break;
    }
    case KernelFamily::biot_savart_2d: {
      const int mt = spec.m_trunc;
      for (int k1 = 0; k1 <= mt; ++k1) {
        for (int k2 = -mt; k2 <= mt; ++k2) {
          if (k1 == 0 && k2 <= 0) continue;
          const double norm2 = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
          TrigMode mode;
          mode.k = {k1, k2};
          mode.cos_coef = Vec::zeros(2);
          mode.sin_coef = Vec{2, {-spec.amplitude * k2 / (kPi * norm2),
                                  spec.amplitude * k1 / (kPi * norm2)}};
          modes.push_back(mode);
        }
      }
      break;
    }
    case KernelFamily::gradient_of_potential:
      modes = cosine_potential_gradient(dim, spec.amplitude, spec.wavenumber);
      break;
  }
  TrigSeries series(dim, modes);
  return spec.delta > 0.0 ? series.heat_smoothed(spec.delta) : series;
}

void validate(const KernelSpec& spec) {
  require(spec.dim == 1 || spec.dim == 2, "kernel dimension must be 1 or 2");
  require(std::isfinite(spec.amplitude), "kernel amplitude must be finite");
  require(std::isfinite(spec.delta) && spec.delta >= 0.0, "kernel delta must be >= 0");
  for (double a : spec.amplitudes) require(std::isfinite(a), "kernel amplitudes must be finite");
  if (spec.family == KernelFamily::biot_savart_2d) {
    require(spec.dim == 2, "biot_savart_2d requires d = 2");
    // An untruncated, unmollified vortex kernel is unbounded at the origin.
    require(spec.m_trunc >= 1, "biot_savart_2d requires m_trunc >= 1");
  }
  if (spec.family == KernelFamily::gradient_of_potential) {
    require(spec.wavenumber >= 1, "gradient_of_potential requires wavenumber >= 1");
  }
}

}  // namespace

std::string_view family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::zero:
      return "zero";
    case KernelFamily::smooth_trig:
      return "smooth_trig";
    case KernelFamily::biot_savart_2d:
      return "biot_savart_2d";
    case KernelFamily::gradient_of_potential:
      return "gradient_of_potential";
  }
  return "?";
}

KernelFamily parse_kernel_family(std::string_view name) {
  for (auto f : {KernelFamily::zero, KernelFamily::smooth_trig, KernelFamily::biot_savart_2d,
                 KernelFamily::gradient_of_potential}) {
    if (family_name(f) == name) return f;
  }
  throw InvalidArgument("unknown kernel family '" + std::string(name) + "'");
}

Kernel::Kernel(KernelSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  series_ = build_series(spec_);
}

Vec eval_kernel(const Kernel& kernel, const TorusPoint& x) {
  if (x.dim() != kernel.dim()) throw InvalidArgument("eval_kernel: dimension mismatch");
  return kernel.series().eval(x.coords());
}

Vec eval_kernel(const Kernel& kernel, const Vec& x) { return kernel.series().eval(x); }

Kernel mollify(const Kernel& kernel, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("mollify: delta must be > 0");
  KernelSpec spec = kernel.spec();
  spec.delta = std::sqrt(spec.delta * spec.delta + delta * delta);
  return Kernel(spec);
}

double Mat::frobenius() const {
  return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]);
}

Mat PrimitiveMatrix::eval(const Vec& x) const {
  Mat out;
  out.dim = dim_;
  for (const Mode& m : modes_) {
    double u = m.k[0] * x[0];
    if (dim_ == 2) u += m.k[1] * x[1];
    const double r = u - std::nearbyint(u);
    const double s = std::sin(2.0 * kPi * r);
    const double c = std::cos(2.0 * kPi * r);
    for (std::size_t e = 0; e < 4; ++e) out.a[e] += m.sin_coef.a[e] * s + m.cos_coef.a[e] * c;
  }
  return out;
}

std::array<std::complex<double>, 4> PrimitiveMatrix::coefficient(WaveVector k) const {
  std::array<std::complex<double>, 4> out{};
  WaveVector key = k;
  const bool positive = canonical_wave_vector(key);
  const double sign = positive ? -1.0 : 1.0;
  for (const Mode& m : modes_) {
    if (m.k != key) continue;
    for (std::size_t e = 0; e < 4; ++e) {
      out[e] += std::complex<double>(0.5 * m.cos_coef.a[e], sign * 0.5 * m.sin_coef.a[e]);
    }
  }
  return out;
}

TrigSeries PrimitiveMatrix::row_series(int i) const {
  std::vector<TrigMode> modes;
  for (const Mode& m : modes_) {
    TrigMode t;
    t.k = m.k;
    t.sin_coef = Vec::zeros(dim_);
    t.cos_coef = Vec::zeros(dim_);
    for (int j = 0; j < dim_; ++j) {
      t.sin_coef[j] = m.sin_coef(i, j);
      t.cos_coef[j] = m.cos_coef(i, j);
    }
    modes.push_back(t);
  }
  return TrigSeries(dim_, modes);
}

PrimitiveMatrix primitive_matrix(const Kernel& kernel) {
  const TrigSeries& series = kernel.series();
  const int dim = series.dim();
  const Vec mean = series.mean();
  if (mean[0] != 0.0 || mean[1] != 0.0) {
    throw InvalidArgument("primitive_matrix: kernel has nonzero mean, no bounded primitive");
  }
  std::vector<PrimitiveMatrix::Mode> modes;
  for (const TrigMode& m : series.modes()) {
    if (m.k[0] == 0 && m.k[1] == 0) continue;
    const double k2 = static_cast<double>(m.k[0]) * m.k[0] + static_cast<double>(m.k[1]) * m.k[1];
    PrimitiveMatrix::Mode pm;
    pm.k = m.k;
    pm.sin_coef.dim = dim;
    pm.cos_coef.dim = dim;
    // d_j of (k_j / (2 pi |k|^2)) (-s cos + c sin), summed over j, gives s sin + c cos.
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        const double w = m.k[static_cast<std::size_t>(j)] / (2.0 * kPi * k2);
        pm.cos_coef(i, j) = -m.sin_coef[i] * w;
        pm.sin_coef(i, j) = m.cos_coef[i] * w;
      }
    }
    modes.push_back(pm);
  }
  return PrimitiveMatrix(dim, std::move(modes));
}

double wminus_norm_surrogate(const PrimitiveMatrix& v, int resolution) {
  if (resolution < 16) throw InvalidArgument("wminus_norm_surrogate: resolution must be >= 16");
  const int dim = v.dim();
  int max_k = 0;
  for (const auto& m : v.modes()) max_k = std::max({max_k, std::abs(m.k[0]), std::abs(m.k[1])});
  // Synthesize on a refinement of the requested grid that resolves every mode,
  // then read off the requested nodes.
  int stride = 1;
  while (resolution * stride < 2 * max_k + 2 || (resolution * stride) % 2 != 0) stride *= 2;
  const int fine = resolution * stride;

  std::vector<std::vector<double>> entries;  // entries[i * dim + j]
  for (int i = 0; i < dim; ++i) {
    for (auto& comp : synthesize(v.row_series(i), fine)) entries.push_back(std::move(comp));
  }
  const int ny = dim == 2 ? resolution : 1;
  const auto ufine = static_cast<std::size_t>(fine);
  double best = 0.0;
  for (int a = 0; a < resolution; ++a) {
    for (int b = 0; b < ny; ++b) {
      const std::size_t idx = dim == 2 ? static_cast<std::size_t>(a * stride) * ufine +
                                             static_cast<std::size_t>(b * stride)
                                       : static_cast<std::size_t>(a * stride);
      double sq = 0.0;
      for (const auto& e : entries) sq += e[idx] * e[idx];
      best = std::max(best, std::sqrt(sq));
    }
  }
  return best;
}

std::string_view family_name(DriftFamily family) {
  switch (family) {
    case DriftFamily::zero:
      return "zero";
    case DriftFamily::constant:
      return "constant";
    case DriftFamily::trig_potential:
      return "trig_potential";
  }
  return "?";
}

DriftFamily parse_drift_family(std::string_view name) {
  for (auto f : {DriftFamily::zero, DriftFamily::constant, DriftFamily::trig_potential}) {
    if (family_name(f) == name) return f;
  }
  throw InvalidArgument("unknown drift family '" + std::string(name) + "'");
}

Drift::Drift(DriftSpec spec) : spec_(std::move(spec)) {
  require(spec_.dim == 1 || spec_.dim == 2, "drift dimension must be 1 or 2");
  std::vector<TrigMode> modes;
  switch (spec_.family) {
    case DriftFamily::zero:
      break;
    case DriftFamily::constant: {
      require(std::isfinite(spec_.value[0]) && std::isfinite(spec_.value[1]),
              "constant drift must be finite");
      TrigMode m;
      m.k = {0, 0};
      m.sin_coef = Vec::zeros(spec_.dim);
      m.cos_coef = spec_.value;
      m.cos_coef.dim = spec_.dim;
      modes.push_back(m);
      break;
    }
    case DriftFamily::trig_potential:
      require(spec_.wavenumber >= 1, "trig_potential drift requires wavenumber >= 1");
      require(std::isfinite(spec_.amplitude), "drift amplitude must be finite");
      modes = cosine_potential_gradient(spec_.dim, spec_.amplitude, spec_.wavenumber);
      break;
  }
  series_ = TrigSeries(spec_.dim, modes);
}

}  // namespace chaoslab
