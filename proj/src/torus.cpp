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

#include "chaoslab/torus.hpp"

#include <string>

#include "chaoslab/error.hpp"

namespace chaoslab {

TorusPoint TorusPoint::wrap(std::span<const double> v) {
  if (v.size() != 1 && v.size() != 2) {
    throw InvalidArgument("torus points support d in {1, 2}, got d = " +
                          std::to_string(v.size()));
  }
  TorusPoint p;
  p.coords_.dim = static_cast<int>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw InvalidArgument("cannot wrap a non-finite coordinate");
    p.coords_.c[i] = wrap_coordinate(v[i]);
  }
  return p;
}

TorusPoint TorusPoint::wrap(const Vec& v) {
  return wrap(std::span<const double>(v.c.data(), static_cast<std::size_t>(v.dim)));
}

Vec min_displacement(const TorusPoint& x, const TorusPoint& y) {
  if (x.dim() != y.dim()) throw InvalidArgument("min_displacement: dimension mismatch");
  Vec out = Vec::zeros(x.dim());
  for (int a = 0; a < x.dim(); ++a) out[a] = min_image(x[a] - y[a]);
  return out;
}

double torus_distance(const TorusPoint& x, const TorusPoint& y) {
  return min_displacement(x, y).norm();
}

}  // namespace chaoslab
