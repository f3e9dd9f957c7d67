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

#include "chaoslab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <string>

#include "chaoslab/error.hpp"

namespace chaoslab {
namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Fft::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
    fftw_free(real);
    fftw_free(spec);
  }
};

Fft::Fft(int dim, int n) : dim_(dim), n_(n) {
  if (dim != 1 && dim != 2) throw InvalidArgument("Fft supports d in {1, 2}");
  if (n < 4 || n % 2 != 0) throw InvalidArgument("Fft grid size must be even and >= 4");
  const auto un = static_cast<std::size_t>(n);
  real_size_ = dim == 1 ? un : un * un;
  spectral_size_ = dim == 1 ? un / 2 + 1 : un * (un / 2 + 1);

  plans_ = std::make_unique<Plans>();
  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->real = fftw_alloc_real(real_size_);
  plans_->spec = fftw_alloc_complex(spectral_size_);
  if (dim == 1) {
    plans_->r2c = fftw_plan_dft_r2c_1d(n, plans_->real, plans_->spec, FFTW_ESTIMATE);
    plans_->c2r = fftw_plan_dft_c2r_1d(n, plans_->spec, plans_->real, FFTW_ESTIMATE);
  } else {
    plans_->r2c = fftw_plan_dft_r2c_2d(n, n, plans_->real, plans_->spec, FFTW_ESTIMATE);
    plans_->c2r = fftw_plan_dft_c2r_2d(n, n, plans_->spec, plans_->real, FFTW_ESTIMATE);
  }
  if (!plans_->r2c || !plans_->c2r) throw NumericalFailure("FFTW planning failed");
}

Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::forward(std::span<const double> in, std::span<Complex> out) {
  if (in.size() != real_size_ || out.size() != spectral_size_) {
    throw InvalidArgument("Fft::forward: size mismatch");
  }
  std::copy(in.begin(), in.end(), plans_->real);
  fftw_execute(plans_->r2c);
  const double scale = 1.0 / static_cast<double>(real_size_);
  for (std::size_t i = 0; i < spectral_size_; ++i) {
    out[i] = Complex(plans_->spec[i][0] * scale, plans_->spec[i][1] * scale);
  }
}

void Fft::inverse(std::span<const Complex> in, std::span<double> out) {
  if (in.size() != spectral_size_ || out.size() != real_size_) {
    throw InvalidArgument("Fft::inverse: size mismatch");
  }
  for (std::size_t i = 0; i < spectral_size_; ++i) {
    plans_->spec[i][0] = in[i].real();
    plans_->spec[i][1] = in[i].imag();
  }
  fftw_execute(plans_->c2r);
  std::copy(plans_->real, plans_->real + real_size_, out.begin());
}

WaveVector Fft::wave_vector(std::size_t spectral_index) const {
  const std::size_t half = static_cast<std::size_t>(n_ / 2 + 1);
  if (dim_ == 1) return {static_cast<int>(spectral_index), 0};
  const int i0 = static_cast<int>(spectral_index / half);
  const int i1 = static_cast<int>(spectral_index % half);
  return {signed_frequency(i0, n_), i1};
}

std::ptrdiff_t Fft::index_of(WaveVector k) const {
  const int half = n_ / 2;
  if (dim_ == 1) {
    if (k[0] < 0 || k[0] > half) return -1;
    return k[0];
  }
  if (k[1] < 0 || k[1] > half || k[0] > half || k[0] <= -half) return -1;
  const int i0 = k[0] >= 0 ? k[0] : k[0] + n_;
  return static_cast<std::ptrdiff_t>(i0) * (half + 1) + k[1];
}

std::vector<double> synthesize_component(const TrigSeries& series, int component, int n) {
  if (n < 2 * series.max_wavenumber() + 2) {
    throw InvalidArgument("synthesize: grid n = " + std::to_string(n) +
                          " aliases wavenumber " + std::to_string(series.max_wavenumber()));
  }
  Fft fft(series.dim(), n);
  std::vector<Complex> spec(fft.spectral_size(), Complex(0.0, 0.0));
  const auto c = static_cast<std::size_t>(component);
  for (const TrigMode& m : series.modes()) {
    for (WaveVector k : {m.k, WaveVector{-m.k[0], -m.k[1]}}) {
      const std::ptrdiff_t idx = fft.index_of(k);
      if (idx < 0) continue;
      if (m.k[0] == 0 && m.k[1] == 0 && k != m.k) continue;  // constant counted once
      spec[static_cast<std::size_t>(idx)] += series.coefficient(k)[c];
    }
  }
  std::vector<double> out(fft.real_size());
  fft.inverse(spec, out);
  return out;
}

std::vector<std::vector<double>> synthesize(const TrigSeries& series, int n) {
  std::vector<std::vector<double>> out;
  for (int a = 0; a < series.dim(); ++a) out.push_back(synthesize_component(series, a, n));
  return out;
}

}  // namespace chaoslab
