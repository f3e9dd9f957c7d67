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

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "chaoslab/error.hpp"
#include "chaoslab/torus.hpp"
#include "doctest.h"

using namespace chaoslab;

namespace {

TorusPoint pt(std::initializer_list<double> v) {
  std::vector<double> c(v);
  return TorusPoint::wrap(std::span<const double>(c));
}

}  // namespace

TEST_CASE("wrap reduces modulo one") {
  CHECK(pt({0.3})[0] == 0.3);
  CHECK(pt({1.25})[0] == 0.25);
  const TorusPoint p = pt({-0.1, 2.0});
  CHECK(p.dim() == 2);
  CHECK(std::abs(p[0] - 0.9) < 1e-15);
  CHECK(p[1] == 0.0);
  CHECK(pt({-1e-20})[0] == 0.0);
  CHECK(pt({1.0})[0] == 0.0);
}

TEST_CASE("wrap rejects non-finite input and bad dimension") {
  std::vector<double> bad{std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(TorusPoint::wrap(std::span<const double>(bad)), InvalidArgument);
  std::vector<double> inf{0.0, std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(TorusPoint::wrap(std::span<const double>(inf)), InvalidArgument);
  std::vector<double> three{0.1, 0.2, 0.3};
  CHECK_THROWS_AS(TorusPoint::wrap(std::span<const double>(three)), InvalidArgument);
}

TEST_CASE("min_displacement examples") {
  Vec d = min_displacement(pt({0.1}), pt({0.9}));
  CHECK(std::abs(d[0] - 0.2) < 1e-15);
  CHECK(min_displacement(pt({0.5}), pt({0.5}))[0] == 0.0);
  d = min_displacement(pt({0.75, 0.0}), pt({0.0, 0.9}));
  CHECK(std::abs(d[0] + 0.25) < 1e-15);
  CHECK(std::abs(d[1] - 0.1) < 1e-15);
  // Tie at exactly one half goes to -1/2.
  CHECK(min_displacement(pt({0.5}), pt({0.0}))[0] == -0.5);
  CHECK(min_displacement(pt({0.0}), pt({0.5}))[0] == -0.5);
}

TEST_CASE("torus_distance examples") {
  CHECK(std::abs(torus_distance(pt({0.1}), pt({0.9})) - 0.2) < 1e-15);
  CHECK(torus_distance(pt({0.3, 0.7}), pt({0.3, 0.7})) == 0.0);
  CHECK(std::abs(torus_distance(pt({0.0, 0.0}), pt({0.5, 0.5})) - std::sqrt(2.0) / 2) < 1e-15);
}

TEST_CASE("geometry properties on random points") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int dim = 1 + trial % 2;
    std::vector<double> a(dim), b(dim), c(dim);
    for (int k = 0; k < dim; ++k) {
      a[k] = u(gen);
      b[k] = u(gen);
      c[k] = u(gen);
    }
    const TorusPoint x = TorusPoint::wrap(std::span<const double>(a));
    const TorusPoint y = TorusPoint::wrap(std::span<const double>(b));
    const TorusPoint z = TorusPoint::wrap(std::span<const double>(c));
    for (int k = 0; k < dim; ++k) CHECK((x[k] >= 0.0 && x[k] < 1.0));

    // idempotence
    std::vector<double> xc(x.coords().c.begin(), x.coords().c.begin() + dim);
    const TorusPoint xx = TorusPoint::wrap(std::span<const double>(xc));
    for (int k = 0; k < dim; ++k) CHECK(xx[k] == x[k]);

    // antisymmetry away from the tie
    const Vec dxy = min_displacement(x, y);
    const Vec dyx = min_displacement(y, x);
    for (int k = 0; k < dim; ++k) {
      REQUIRE(dxy[k] >= -0.5);
      REQUIRE(dxy[k] < 0.5);
      if (std::abs(std::abs(dxy[k]) - 0.5) > 1e-12) CHECK(dxy[k] == -dyx[k]);
    }

    // metric axioms and diameter bound
    const double dist = torus_distance(x, y);
    CHECK(dist >= 0.0);
    CHECK(dist <= std::sqrt(static_cast<double>(dim)) / 2 + 1e-15);
    CHECK(std::abs(dist - torus_distance(y, x)) < 1e-15);
    CHECK(torus_distance(x, z) <= dist + torus_distance(y, z) + 1e-12);

    // any lift of x - y is at least as long
    for (int shift = -2; shift <= 2; ++shift) {
      double lift = 0.0;
      for (int k = 0; k < dim; ++k) {
        const double v = x[k] - y[k] + (k == 0 ? shift : 0);
        lift += v * v;
      }
      CHECK(dist <= std::sqrt(lift) + 1e-15);
    }
    CHECK(std::abs(torus_distance_sq(x.coords().c.data(), y.coords().c.data(), dim) -
                   dist * dist) < 1e-15);
  }
}
