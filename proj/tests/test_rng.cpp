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
#include <set>
#include <vector>

#include "chaoslab/rng.hpp"
#include "doctest.h"

using namespace chaoslab;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Reference outputs of the Random123 distribution (kat_vectors).
  const rng::Counter z = rng::philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(z == rng::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  const rng::Counter f = rng::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                         {0xffffffffu, 0xffffffffu});
  CHECK(f == rng::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  const rng::Counter p = rng::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                         {0xa4093822u, 0x299f31d0u});
  CHECK(p == rng::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("derived keys separate tags and seeds") {
  std::set<std::pair<std::uint32_t, std::uint32_t>> keys;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (std::uint64_t n : {64u, 128u}) {
      for (std::uint64_t r = 0; r < 50; ++r) {
        const auto k = rng::derive_key(seed, {n, r});
        keys.insert({k[0], k[1]});
      }
    }
  }
  CHECK(keys.size() == 20u * 2u * 50u);
  CHECK(rng::derive_key(5, {1, 2}) == rng::derive_key(5, {1, 2}));
  CHECK(rng::derive_key(5, {1, 2}) != rng::derive_key(5, {2, 1}));
}

TEST_CASE("open_uniform stays inside (0, 1)") {
  CHECK(rng::open_uniform(0, 0) > 0.0);
  CHECK(rng::open_uniform(0xffffffffu, 0xffffffffu) < 1.0);
}

TEST_CASE("uniform stream moments and reproducibility") {
  rng::UniformStream a(rng::derive_key(3, {}), 17, rng::Purpose::test);
  rng::UniformStream b(rng::derive_key(3, {}), 17, rng::Purpose::test);
  rng::UniformStream c(rng::derive_key(3, {}), 17, rng::Purpose::noise);
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  int same_as_c = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.next();
    CHECK(x == b.next());
    if (x == c.next()) ++same_as_c;
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  // 5 sigma bands: sd(mean) = sqrt(1/12/n), sd(var) ~ sqrt(1/180/n)
  CHECK(std::abs(mean - 0.5) < 5 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(var - 1.0 / 12) < 5 * std::sqrt(1.0 / 180 / n));
  CHECK(same_as_c == 0);
}
