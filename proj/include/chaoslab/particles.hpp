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
#include <cstddef>
#include <cstdint>
#include <vector>

#include "chaoslab/grid.hpp"
#include "chaoslab/kernels.hpp"
#include "chaoslab/rng.hpp"
#include "chaoslab/torus.hpp"

namespace chaoslab {

/// N particles on T^d, stored coordinate-major: coords[a][i] is coordinate a of
/// particle i. All coordinates lie in [0, 1).
struct ParticleConfig {
  int dim = 1;
  double time = 0.0;
  std::array<std::vector<double>, 2> coords;

  std::size_t size() const { return coords[0].size(); }
  TorusPoint point(std::size_t i) const;

  /// Coordinates interleaved particle by particle, the layout used by OT code.
  std::vector<double> interleaved() const;
};

struct SimParams {
  int n_particles = 2;
  double horizon = 0.5;  // T
  double dt = 0.5 / 400;
  std::uint64_t seed = 0;
  Kernel kernel;
  Drift drift;
  GridDensity rho0;
  /// Test hook: false removes the Brownian term.
  bool noise = true;

  /// T / dt rounded; throws InvalidArgument unless it is a positive integer to
  /// within 1e-9 relative.
  int step_count() const;
  void validate() const;
};

/// Random streams of one replica. The key is derived from (seed, N, replica);
/// particle i draws from stream ids[i], which is i unless a test permutes it.
struct ReplicaStreams {
  rng::Key key{0, 0};
  std::vector<std::uint32_t> ids;

  static ReplicaStreams for_replica(std::uint64_t seed, std::size_t n_particles,
                                    std::uint64_t replica);
};

/// N i.i.d. draws from rho0 (inverse CDF in d = 1, rejection in d = 2), using
/// Purpose::initial_sample on the given streams.
ParticleConfig sample_initial(const GridDensity& rho0, const ReplicaStreams& streams);

/// N i.i.d. draws from a density using the given purpose tag; sample_initial
/// is this with Purpose::initial_sample.
ParticleConfig sample_density(const GridDensity& rho, const ReplicaStreams& streams,
                              rng::Purpose purpose);

/// Convenience overload: streams for replica 0 of (seed, N).
ParticleConfig sample_initial(const GridDensity& rho0, std::size_t n_particles,
                              std::uint64_t seed);

/// b^i = F(x^i) + (1/N) sum_{j != i} K(x^i - x^j), evaluated through per-mode
/// structure factors in O(N * modes). drift[a][i] is component a.
void drift_field(const ParticleConfig& config, const Kernel& kernel, const Drift& drift,
                 std::array<std::vector<double>, 2>& out);

/// Same quantity by direct O(N^2) pair summation. For odd kernels each pair is
/// evaluated once and applied with opposite signs.
void drift_field_pairwise(const ParticleConfig& config, const Kernel& kernel, const Drift& drift,
                          std::array<std::vector<double>, 2>& out);

/// Standard Gaussian increments for successive Euler-Maruyama steps.
class NoiseSource {
 public:
  /// Brownian increments from the replica streams (Purpose::noise).
  NoiseSource(ReplicaStreams streams, int dim);

  /// Zero increments; test hook for deterministic dynamics.
  static NoiseSource none(int dim);

  bool enabled() const { return enabled_; }

  /// Fills z[a][i] for the next step.
  void next(std::array<std::vector<double>, 2>& z);

 private:
  NoiseSource() = default;

  bool enabled_ = false;
  int dim_ = 1;
  ReplicaStreams streams_;
  std::uint64_t step_ = 0;
  std::vector<double> cached_;  // d = 1: odd-step half of the last block
};

/// One Euler-Maruyama step with reusable scratch storage.
class Integrator {
 public:
  Integrator(const Kernel& kernel, const Drift& drift);

  /// x^i <- wrap(x^i + b^i dt + sqrt(2 dt) xi^i); time += dt.
  void step(ParticleConfig& config, double dt, NoiseSource& noise);

 private:
  const Kernel* kernel_;
  const Drift* drift_;
  std::array<std::vector<double>, 2> drift_buf_;
  std::array<std::vector<double>, 2> noise_buf_;
};

/// Single step, allocating scratch; see Integrator::step.
ParticleConfig em_step(const ParticleConfig& config, const Kernel& kernel, const Drift& drift,
                       double dt, NoiseSource& noise);

/// Samples X_0 for `replica` and integrates to T. A pure function of
/// (params, replica); streams may be overridden by tests.
ParticleConfig simulate(const SimParams& params, std::uint64_t replica);
ParticleConfig simulate(const SimParams& params, const ReplicaStreams& streams);

}  // namespace chaoslab
