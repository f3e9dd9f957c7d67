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

#include "chaoslab/particles.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chaoslab/error.hpp"
#include "chaoslab/simd.hpp"

namespace chaoslab {
namespace {

constexpr auto kNoiseTag = static_cast<std::uint32_t>(rng::Purpose::noise);

ParticleConfig empty_config(int dim, std::size_t n) {
  ParticleConfig c;
  c.dim = dim;
  c.coords[0].assign(n, 0.0);
  if (dim == 2) c.coords[1].assign(n, 0.0);
  return c;
}

void reset(std::array<std::vector<double>, 2>& out, int dim, std::size_t n) {
  for (int a = 0; a < 2; ++a) {
    auto& v = out[static_cast<std::size_t>(a)];
    if (a < dim) {
      v.assign(n, 0.0);
    } else {
      v.clear();
    }
  }
}

// F(x^i) added in place, mode by mode.
void add_external_drift(const ParticleConfig& config, const Drift& drift,
                        std::array<std::vector<double>, 2>& out, std::vector<double>& s,
                        std::vector<double>& c) {
  const auto& t = simd::active();
  const std::size_t n = config.size();
  const int dim = config.dim;
  const double* x2 = dim == 2 ? config.coords[1].data() : nullptr;
  for (const TrigMode& m : drift.series().modes()) {
    if (m.k[0] == 0 && m.k[1] == 0) {
      for (int a = 0; a < dim; ++a) {
        for (double& v : out[static_cast<std::size_t>(a)]) v += m.cos_coef[a];
      }
      continue;
    }
    t.mode_phase(config.coords[0].data(), x2, m.k[0], m.k[1], s.data(), c.data(), n);
    for (int a = 0; a < dim; ++a) {
      t.accumulate_modes(out[static_cast<std::size_t>(a)].data(), s.data(), c.data(),
                         m.sin_coef[a], m.cos_coef[a], n);
    }
  }
}

}  // namespace

TorusPoint ParticleConfig::point(std::size_t i) const {
  Vec v = Vec::zeros(dim);
  for (int a = 0; a < dim; ++a) v[a] = coords[static_cast<std::size_t>(a)][i];
  return TorusPoint::wrap(v);
}

std::vector<double> ParticleConfig::interleaved() const {
  const std::size_t n = size();
  std::vector<double> out(n * static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < dim; ++a) out[i * dim + a] = coords[static_cast<std::size_t>(a)][i];
  }
  return out;
}

int SimParams::step_count() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be > 0");
  if (!(horizon >= dt) || !std::isfinite(horizon)) throw InvalidArgument("need 0 < dt <= T");
  const double ratio = horizon / dt;
  const double steps = std::round(ratio);
  if (std::abs(ratio - steps) > 1e-9 * steps) {
    throw InvalidArgument("T / dt must be an integer step count");
  }
  return static_cast<int>(steps);
}

void SimParams::validate() const {
  if (n_particles < 2) throw InvalidArgument("N must be >= 2");
  step_count();
  rho0.validate();
  if (!(rho0.min() > 0.0)) throw InvalidArgument("rho0 must be bounded below by a positive constant");
  if (kernel.dim() != rho0.dim || drift.dim() != rho0.dim) {
    throw InvalidArgument("kernel, drift and rho0 dimensions differ");
  }
}

ReplicaStreams ReplicaStreams::for_replica(std::uint64_t seed, std::size_t n_particles,
                                           std::uint64_t replica) {
  ReplicaStreams s;
  s.key = rng::derive_key(seed, {static_cast<std::uint64_t>(n_particles), replica});
  s.ids.resize(n_particles);
  for (std::size_t i = 0; i < n_particles; ++i) s.ids[i] = static_cast<std::uint32_t>(i);
  return s;
}

ParticleConfig sample_initial(const GridDensity& rho0, const ReplicaStreams& streams) {
  return sample_density(rho0, streams, rng::Purpose::initial_sample);
}

ParticleConfig sample_density(const GridDensity& rho0, const ReplicaStreams& streams,
                              rng::Purpose purpose) {
  const double mass = rho0.mass();
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidArgument("rho0 has nonpositive mass");
  const std::size_t n_particles = streams.ids.size();
  ParticleConfig config = empty_config(rho0.dim, n_particles);
  const int n = rho0.n;
  const double h = 1.0 / n;

  if (rho0.dim == 1) {
    // Cells start at -h/2; the CDF is piecewise linear across them.
    std::vector<double> cum(static_cast<std::size_t>(n));
    double acc = 0.0;
    for (std::size_t c = 0; c < cum.size(); ++c) {
      acc += std::max(rho0.values[c], 0.0);
      cum[c] = acc;
    }
    for (std::size_t i = 0; i < n_particles; ++i) {
      rng::UniformStream u(streams.key, streams.ids[i], purpose);
      const double target = u.next() * acc;
      auto it = std::upper_bound(cum.begin(), cum.end(), target);
      if (it == cum.end()) --it;
      const auto c = static_cast<std::size_t>(it - cum.begin());
      const double lo = c == 0 ? 0.0 : cum[c - 1];
      const double w = cum[c] - lo;
      const double frac = w > 0.0 ? std::clamp((target - lo) / w, 0.0, 1.0) : 0.5;
      config.coords[0][i] = wrap_coordinate((static_cast<double>(c) - 0.5 + frac) * h);
    }
    return config;
  }

  const double top = rho0.max();
  if (!(top > 0.0)) throw InvalidArgument("rho0 has nonpositive mass");
  for (std::size_t i = 0; i < n_particles; ++i) {
    rng::UniformStream u(streams.key, streams.ids[i], purpose);
    for (;;) {
      const double x = u.next();
      const double y = u.next();
      const double accept = u.next();
      const std::size_t cell = static_cast<std::size_t>(cell_of(x, n)) * static_cast<std::size_t>(n) +
                               static_cast<std::size_t>(cell_of(y, n));
      if (accept * top < rho0.values[cell]) {
        config.coords[0][i] = x;
        config.coords[1][i] = y;
        break;
      }
    }
  }
  return config;
}

ParticleConfig sample_initial(const GridDensity& rho0, std::size_t n_particles,
                              std::uint64_t seed) {
  return sample_initial(rho0, ReplicaStreams::for_replica(seed, n_particles, 0));
}

void drift_field(const ParticleConfig& config, const Kernel& kernel, const Drift& drift,
                 std::array<std::vector<double>, 2>& out) {
  thread_local std::vector<double> s;
  thread_local std::vector<double> c;
  const std::size_t n = config.size();
  const int dim = config.dim;
  reset(out, dim, n);
  s.resize(n);
  c.resize(n);

  const auto& t = simd::active();
  const double inv_n = 1.0 / static_cast<double>(n);
  const double* x2 = dim == 2 ? config.coords[1].data() : nullptr;
  // Mode sums run over all j; the j = i term K(0) is removed afterwards.
  Vec self = Vec::zeros(dim);
  Vec constant = Vec::zeros(dim);
  for (const TrigMode& m : kernel.series().modes()) {
    if (m.k[0] == 0 && m.k[1] == 0) {
      constant = constant + m.cos_coef;
      self = self + m.cos_coef;
      continue;
    }
    // sum_j sin(th_i - th_j) = s_i C - c_i S,  sum_j cos(th_i - th_j) = c_i C + s_i S
    const simd::PhaseSums sums =
        t.mode_phase(config.coords[0].data(), x2, m.k[0], m.k[1], s.data(), c.data(), n);
    for (int a = 0; a < dim; ++a) {
      const double sa = m.sin_coef[a];
      const double ca = m.cos_coef[a];
      if (sa == 0.0 && ca == 0.0) continue;
      self[a] += ca;
      const double alpha = (sa * sums.cos_sum + ca * sums.sin_sum) * inv_n;
      const double beta = (ca * sums.cos_sum - sa * sums.sin_sum) * inv_n;
      t.accumulate_modes(out[static_cast<std::size_t>(a)].data(), s.data(), c.data(), alpha, beta,
                         n);
    }
  }
  for (int a = 0; a < dim; ++a) {
    const double shift = constant[a] - self[a] * inv_n;
    if (shift != 0.0) {
      for (double& v : out[static_cast<std::size_t>(a)]) v += shift;
    }
  }
  add_external_drift(config, drift, out, s, c);
}

void drift_field_pairwise(const ParticleConfig& config, const Kernel& kernel, const Drift& drift,
                          std::array<std::vector<double>, 2>& out) {
  const std::size_t n = config.size();
  const int dim = config.dim;
  reset(out, dim, n);
  const double inv_n = 1.0 / static_cast<double>(n);
  const TrigSeries& k = kernel.series();
  const bool odd = k.is_odd();
  if (!k.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        Vec d = Vec::zeros(dim);
        for (int a = 0; a < dim; ++a) {
          const auto& x = config.coords[static_cast<std::size_t>(a)];
          d[a] = min_image(x[i] - x[j]);
        }
        const Vec kij = k.eval(d);
        const Vec kji = odd ? -kij : k.eval(-d);
        for (int a = 0; a < dim; ++a) {
          out[static_cast<std::size_t>(a)][i] += kij[a] * inv_n;
          out[static_cast<std::size_t>(a)][j] += kji[a] * inv_n;
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec f = drift.series().eval(config.point(i).coords());
    for (int a = 0; a < dim; ++a) out[static_cast<std::size_t>(a)][i] += f[a];
  }
}

NoiseSource::NoiseSource(ReplicaStreams streams, int dim)
    : enabled_(true), dim_(dim), streams_(std::move(streams)) {
  if (dim != 1 && dim != 2) throw InvalidArgument("noise source: d must be 1 or 2");
}

NoiseSource NoiseSource::none(int dim) {
  NoiseSource s;
  s.dim_ = dim;
  return s;
}

void NoiseSource::next(std::array<std::vector<double>, 2>& z) {
  const std::size_t n = streams_.ids.size();
  for (int a = 0; a < dim_; ++a) z[static_cast<std::size_t>(a)].resize(n);
  if (!enabled_) {
    for (int a = 0; a < dim_; ++a) {
      std::fill(z[static_cast<std::size_t>(a)].begin(), z[static_cast<std::size_t>(a)].end(), 0.0);
    }
    return;
  }
  const auto& t = simd::active();
  if (dim_ == 2) {
    t.gaussian_pairs(streams_.key, streams_.ids.data(), static_cast<std::uint32_t>(step_),
                     kNoiseTag, z[0].data(), z[1].data(), n);
  } else if (step_ % 2 == 0) {
    // One block serves two consecutive steps in d = 1.
    cached_.resize(n);
    t.gaussian_pairs(streams_.key, streams_.ids.data(), static_cast<std::uint32_t>(step_ / 2),
                     kNoiseTag, z[0].data(), cached_.data(), n);
  } else {
    std::copy(cached_.begin(), cached_.end(), z[0].begin());
  }
  ++step_;
}

Integrator::Integrator(const Kernel& kernel, const Drift& drift)
    : kernel_(&kernel), drift_(&drift) {}

void Integrator::step(ParticleConfig& config, double dt, NoiseSource& noise) {
  const std::size_t n = config.size();
  const bool still = kernel_->series().empty() && drift_->series().empty();
  if (still) {
    reset(drift_buf_, config.dim, n);
  } else {
    drift_field(config, *kernel_, *drift_, drift_buf_);
  }
  const bool noisy = noise.enabled();
  if (noisy) noise.next(noise_buf_);
  const double sigma = std::sqrt(2.0 * dt);
  const auto& t = simd::active();
  for (int a = 0; a < config.dim; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    t.em_update(config.coords[ua].data(), drift_buf_[ua].data(),
                noisy ? noise_buf_[ua].data() : nullptr, dt, sigma, n);
  }
  config.time += dt;
}

ParticleConfig em_step(const ParticleConfig& config, const Kernel& kernel, const Drift& drift,
                       double dt, NoiseSource& noise) {
  if (!(dt > 0.0)) throw InvalidArgument("em_step: dt must be > 0");
  ParticleConfig out = config;
  Integrator integrator(kernel, drift);
  integrator.step(out, dt, noise);
  return out;
}

ParticleConfig simulate(const SimParams& params, std::uint64_t replica) {
  return simulate(params, ReplicaStreams::for_replica(
                              params.seed, static_cast<std::size_t>(params.n_particles), replica));
}

ParticleConfig simulate(const SimParams& params, const ReplicaStreams& streams) {
  params.validate();
  if (streams.ids.size() != static_cast<std::size_t>(params.n_particles)) {
    throw InvalidArgument("simulate: stream count != N");
  }
  const int steps = params.step_count();
  ParticleConfig config = sample_initial(params.rho0, streams);
  NoiseSource noise = params.noise ? NoiseSource(streams, params.rho0.dim)
                                   : NoiseSource::none(params.rho0.dim);
  Integrator integrator(params.kernel, params.drift);
  for (int k = 0; k < steps; ++k) integrator.step(config, params.dt, noise);
  config.time = steps * params.dt;
  return config;
}

}  // namespace chaoslab
