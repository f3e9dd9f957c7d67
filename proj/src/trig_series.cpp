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

#include "chaoslab/trig_series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "chaoslab/error.hpp"

namespace chaoslab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

bool canonical_wave_vector(WaveVector& k) {
  if (k[0] > 0 || (k[0] == 0 && k[1] >= 0)) return true;
  k = {-k[0], -k[1]};
  return false;
}

TrigSeries::TrigSeries(int dim, const std::vector<TrigMode>& modes) : dim_(dim) {
  if (dim != 1 && dim != 2) throw InvalidArgument("trigonometric series support d in {1, 2}");
  for (TrigMode m : modes) {
    if (dim == 1 && m.k[1] != 0) throw InvalidArgument("d = 1 series with a k2 component");
    // sin(-theta) = -sin(theta), cos(-theta) = cos(theta)
    if (!canonical_wave_vector(m.k)) m.sin_coef = -m.sin_coef;
    if (m.k[0] == 0 && m.k[1] == 0) m.sin_coef = Vec::zeros(dim);
    m.sin_coef.dim = dim;
    m.cos_coef.dim = dim;
    const auto key = std::make_pair(m.k[0], m.k[1]);
    if (auto it = index_.find(key); it != index_.end()) {
      TrigMode& existing = modes_[it->second];
      existing.sin_coef = existing.sin_coef + m.sin_coef;
      existing.cos_coef = existing.cos_coef + m.cos_coef;
    } else {
      index_.emplace(key, modes_.size());
      modes_.push_back(m);
    }
  }
}

Vec TrigSeries::eval(const Vec& x) const {
  Vec out = Vec::zeros(dim_);
  for (const TrigMode& m : modes_) {
    double u = m.k[0] * x[0];
    if (dim_ == 2) u += m.k[1] * x[1];
    const double r = u - std::nearbyint(u);
    const double s = std::sin(kTwoPi * r);
    const double c = std::cos(kTwoPi * r);
    for (int a = 0; a < dim_; ++a) out[a] += m.sin_coef[a] * s + m.cos_coef[a] * c;
  }
  return out;
}

ComplexVec TrigSeries::coefficient(WaveVector k) const {
  ComplexVec out{0.0, 0.0};
  WaveVector key = k;
  const bool positive = canonical_wave_vector(key);
  auto it = index_.find({key[0], key[1]});
  if (it == index_.end()) return out;
  const TrigMode& m = modes_[it->second];
  for (int a = 0; a < dim_; ++a) {
    if (key[0] == 0 && key[1] == 0) {
      out[static_cast<std::size_t>(a)] = m.cos_coef[a];
    } else {
      // s sin + c cos = ((c - i s)/2) e^{i theta} + ((c + i s)/2) e^{-i theta}
      const double sign = positive ? -1.0 : 1.0;
      out[static_cast<std::size_t>(a)] = {0.5 * m.cos_coef[a], sign * 0.5 * m.sin_coef[a]};
    }
  }
  return out;
}

int TrigSeries::max_wavenumber() const {
  int best = 0;
  for (const TrigMode& m : modes_) best = std::max({best, std::abs(m.k[0]), std::abs(m.k[1])});
  return best;
}

Vec TrigSeries::mean() const {
  auto it = index_.find({0, 0});
  return it == index_.end() ? Vec::zeros(dim_) : modes_[it->second].cos_coef;
}

bool TrigSeries::is_odd() const {
  return std::all_of(modes_.begin(), modes_.end(), [](const TrigMode& m) {
    return m.cos_coef[0] == 0.0 && m.cos_coef[1] == 0.0;
  });
}

TrigSeries TrigSeries::heat_smoothed(double delta) const {
  std::vector<TrigMode> out = modes_;
  for (TrigMode& m : out) {
    const double k2 = static_cast<double>(m.k[0]) * m.k[0] + static_cast<double>(m.k[1]) * m.k[1];
    const double factor = std::exp(-0.5 * kTwoPi * kTwoPi * k2 * delta * delta);
    m.sin_coef = factor * m.sin_coef;
    m.cos_coef = factor * m.cos_coef;
  }
  return TrigSeries(dim_, out);
}

}  // namespace chaoslab
