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

// Reference implementations. These define the semantics the vector variants
// are tested against.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "chaoslab/rng.hpp"
#include "chaoslab/simd.hpp"

namespace chaoslab::simd::scalar {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline void sincos_one(double u, double& s, double& c) {
  const double r = u - std::nearbyint(u);
  s = std::sin(kTwoPi * r);
  c = std::cos(kTwoPi * r);
}

void sincos_2pi(const double* u, double* s, double* c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) sincos_one(u[i], s[i], c[i]);
}

PhaseSums mode_phase(const double* x1, const double* x2, int k1, int k2, double* s, double* c,
                     std::size_t n) {
  PhaseSums sums;
  const double kk1 = k1;
  const double kk2 = k2;
  for (std::size_t i = 0; i < n; ++i) {
    double u = kk1 * x1[i];
    if (k2 != 0) u += kk2 * x2[i];
    sincos_one(u, s[i], c[i]);
    sums.sin_sum += s[i];
    sums.cos_sum += c[i];
  }
  return sums;
}

void accumulate_modes(double* out, const double* s, const double* c, double alpha, double beta,
                      std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] += alpha * s[i] + beta * c[i];
}

void em_update(double* x, const double* drift, const double* noise, double dt, double sigma,
               std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double y = x[i] + dt * drift[i];
    if (noise != nullptr) y += sigma * noise[i];
    double r = y - std::floor(y);
    x[i] = r >= 1.0 ? 0.0 : r;
  }
}

void gaussian_pairs(Key key, const std::uint32_t* streams, std::uint32_t block, std::uint32_t tag,
                    double* z0, double* z1, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const rng::Counter w = rng::philox4x32({streams[i], block, tag, 0u}, key);
    const double u1 = rng::open_uniform(w[0], w[1]);
    const double u2 = rng::open_uniform(w[2], w[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    double s = 0.0;
    double c = 0.0;
    sincos_one(u2, s, c);
    z0[i] = radius * c;
    z1[i] = radius * s;
  }
}

double logsumexp(const double* a, const double* h, double scale, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) m = std::max(m, h[j] - scale * a[j]);
  if (!std::isfinite(m)) return m;
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) sum += std::exp(h[j] - scale * a[j] - m);
  return m + std::log(sum);
}

void vexp(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::exp(x[i]);
}

void vlog(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::log(x[i]);
}

}  // namespace

const KernelTable kTable{
    .sincos_2pi = sincos_2pi,
    .mode_phase = mode_phase,
    .accumulate_modes = accumulate_modes,
    .em_update = em_update,
    .gaussian_pairs = gaussian_pairs,
    .logsumexp = logsumexp,
    .exp = vexp,
    .log = vlog,
};

}  // namespace chaoslab::simd::scalar
