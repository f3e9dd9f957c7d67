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

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "chaoslab/trig_series.hpp"

namespace chaoslab {

using Complex = std::complex<double>;

/// Real <-> half-complex transform on the periodic n^d grid with nodes
/// x = (i0/n, i1/n), row-major with the first coordinate slowest.
///
/// forward() returns Fourier coefficients f_hat(k) = n^-d sum_x f(x) e^{-2 pi i k.x},
/// so inverse(forward(f)) == f. The spectral array stores k_last in [0, n/2].
///
/// Instances own FFTW plans and scratch buffers: one instance per thread.
class Fft {
 public:
  Fft(int dim, int n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  Fft(Fft&&) noexcept;
  Fft& operator=(Fft&&) noexcept;

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::size_t real_size() const { return real_size_; }
  std::size_t spectral_size() const { return spectral_size_; }

  void forward(std::span<const double> in, std::span<Complex> out);
  void inverse(std::span<const Complex> in, std::span<double> out);

  /// Signed wave vector of a spectral index.
  WaveVector wave_vector(std::size_t spectral_index) const;

  /// Spectral index holding k, or nullopt-like -1 when k is only stored through
  /// its conjugate (negative last component) or is out of range.
  std::ptrdiff_t index_of(WaveVector k) const;

 private:
  struct Plans;
  int dim_;
  int n_;
  std::size_t real_size_;
  std::size_t spectral_size_;
  std::unique_ptr<Plans> plans_;
};

/// Signed frequency of FFT index i on an n-point axis, in (-n/2, n/2].
inline int signed_frequency(int i, int n) { return i <= n / 2 ? i : i - n; }

/// Samples component `component` of a series on the n^d grid by spectral
/// synthesis. Requires n >= 2 * max_wavenumber + 2.
std::vector<double> synthesize_component(const TrigSeries& series, int component, int n);

/// All components, each n^d values.
std::vector<std::vector<double>> synthesize(const TrigSeries& series, int n);

}  // namespace chaoslab
