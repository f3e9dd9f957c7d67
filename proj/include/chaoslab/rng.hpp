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

// Counter-based random numbers. A stream is identified by a 64-bit key derived
// from (master seed, tags...) and a counter; any draw can be recomputed from
// its coordinates alone, so replicas and particles can be processed in any
// order or on any thread without changing results.

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

#include "chaoslab/simd.hpp"

namespace chaoslab::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = simd::Key;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
inline Counter philox4x32(Counter ctr, Key key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Key for the stream addressed by (seed, tags...).
inline Key derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t t : tags) h = splitmix64(h ^ splitmix64(t + 0x632BE59BD9B4E019ull));
  return {static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
}

/// Uniform in the open interval (0, 1) from 64 random bits; 52-bit resolution.
inline double open_uniform(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1p-52;
}

/// Counter tags separating the uses of one key.
enum class Purpose : std::uint32_t {
  initial_sample = 1,
  noise = 2,
  iid_sample = 3,
  test = 4,
};

/// Sequential uniform draws from one stream; a convenience over philox4x32 for
/// code that consumes a variable number of draws (rejection sampling).
class UniformStream {
 public:
  UniformStream(Key key, std::uint32_t stream, Purpose purpose)
      : key_(key), stream_(stream), purpose_(static_cast<std::uint32_t>(purpose)) {}

  double next() {
    if (cursor_ == 2) refill();
    const double u = buffered_[cursor_];
    ++cursor_;
    return u;
  }

 private:
  void refill() {
    const Counter out = philox4x32({stream_, block_, purpose_, 0u}, key_);
    ++block_;
    buffered_ = {open_uniform(out[0], out[1]), open_uniform(out[2], out[3])};
    cursor_ = 0;
  }

  Key key_;
  std::uint32_t stream_;
  std::uint32_t purpose_;
  std::uint32_t block_ = 0;
  std::array<double, 2> buffered_{};
  int cursor_ = 2;
};

}  // namespace chaoslab::rng
