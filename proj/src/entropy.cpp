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

#include "chaoslab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "chaoslab/error.hpp"
#include "chaoslab/spectral.hpp"

namespace chaoslab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_probability(const std::vector<double>& w, const char* name) {
  double s = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument(std::string(name) + ": entries must be finite and >= 0");
    }
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-12) throw InvalidArgument(std::string(name) + ": must sum to 1");
}

double entropy_sum(const std::vector<double>& mu, const std::vector<double>& nu) {
  double h = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] == 0.0) continue;
    if (nu[i] == 0.0) return kInf;
    h += mu[i] * std::log(mu[i] / nu[i]);
  }
  return h;
}

// Overlap of the cells of an n-point axis with `bins` equal bins:
// weights[c] lists (bin, fraction of cell c in that bin).
std::vector<std::vector<std::pair<int, double>>> axis_overlap(int n, int bins) {
  std::vector<std::vector<std::pair<int, double>>> out(static_cast<std::size_t>(n));
  const double h = 1.0 / n;
  for (int c = 0; c < n; ++c) {
    const double lo = (c - 0.5) * h;
    const double hi = (c + 0.5) * h;
    std::vector<double> cuts{lo};
    for (double k = std::floor(lo * bins) + 1.0; k / bins < hi; k += 1.0) cuts.push_back(k / bins);
    cuts.push_back(hi);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (!(cuts[i + 1] > cuts[i])) continue;
      int bin = static_cast<int>(std::floor(0.5 * (cuts[i] + cuts[i + 1]) * bins)) % bins;
      if (bin < 0) bin += bins;
      out[static_cast<std::size_t>(c)].push_back({bin, (cuts[i + 1] - cuts[i]) / h});
    }
  }
  return out;
}

}  // namespace

double relative_entropy(const std::vector<double>& mu, const std::vector<double>& nu) {
  if (mu.size() != nu.size() || mu.empty()) {
    throw InvalidArgument("relative_entropy: measures must share a nonempty index set");
  }
  check_probability(mu, "relative_entropy mu");
  check_probability(nu, "relative_entropy nu");
  return entropy_sum(mu, nu);
}

double relative_entropy_grid(const GridDensity& mu, const GridDensity& nu) {
  if (mu.dim != nu.dim || mu.n != nu.n || mu.size() != nu.size()) {
    throw InvalidArgument("relative_entropy_grid: grid mismatch");
  }
  double h = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double a = mu.values[i];
    if (a <= 0.0) continue;
    if (nu.values[i] <= 0.0) return kInf;
    h += a * std::log(a / nu.values[i]);
  }
  return h * mu.cell_volume();
}

double fisher_information_grid(const GridDensity& rho) {
  for (double v : rho.values) {
    if (!(v > 0.0)) throw InvalidArgument("fisher_information_grid: density must be positive");
  }
  if (rho.n % 2 != 0 || rho.n < 4) {
    throw InvalidArgument("fisher_information_grid: n must be even and >= 4");
  }
  Fft fft(rho.dim, rho.n);
  std::vector<Complex> hat(fft.spectral_size());
  fft.forward(rho.values, hat);
  std::vector<double> sq(rho.size(), 0.0);
  std::vector<Complex> grad_hat(hat.size());
  std::vector<double> grad(rho.size());
  const int nyquist = rho.n / 2;
  for (int a = 0; a < rho.dim; ++a) {
    for (std::size_t i = 0; i < hat.size(); ++i) {
      const int k = fft.wave_vector(i)[static_cast<std::size_t>(a)];
      // The Nyquist mode has no odd derivative on the grid.
      grad_hat[i] = std::abs(k) == nyquist ? Complex(0.0, 0.0)
                                           : Complex(0.0, kTwoPi * k) * hat[i];
    }
    fft.inverse(grad_hat, grad);
    for (std::size_t j = 0; j < sq.size(); ++j) sq[j] += grad[j] * grad[j];
  }
  double total = 0.0;
  for (std::size_t j = 0; j < sq.size(); ++j) total += sq[j] / rho.values[j];
  return total * rho.cell_volume();
}

std::vector<double> bin_masses(const GridDensity& nu, int bins) {
  if (bins < 1) throw InvalidArgument("bin_masses: bins must be >= 1");
  const auto overlap = axis_overlap(nu.n, bins);
  const auto ub = static_cast<std::size_t>(bins);
  std::vector<double> out(nu.dim == 1 ? ub : ub * ub, 0.0);
  const double vol = nu.cell_volume();
  const auto un = static_cast<std::size_t>(nu.n);
  if (nu.dim == 1) {
    for (std::size_t c = 0; c < un; ++c) {
      for (auto [b, w] : overlap[c]) out[static_cast<std::size_t>(b)] += w * nu.values[c] * vol;
    }
    return out;
  }
  for (std::size_t c0 = 0; c0 < un; ++c0) {
    for (std::size_t c1 = 0; c1 < un; ++c1) {
      const double m = nu.values[c0 * un + c1] * vol;
      for (auto [b0, w0] : overlap[c0]) {
        for (auto [b1, w1] : overlap[c1]) {
          out[static_cast<std::size_t>(b0) * ub + static_cast<std::size_t>(b1)] += w0 * w1 * m;
        }
      }
    }
  }
  return out;
}

double binned_kl_estimate(const std::vector<double>& samples, const GridDensity& nu, int bins) {
  const int dim = nu.dim;
  if (bins < 1) throw InvalidArgument("binned_kl_estimate: bins must be >= 1");
  const std::size_t count = samples.size() / static_cast<std::size_t>(dim);
  const std::size_t cells = dim == 1 ? static_cast<std::size_t>(bins)
                                     : static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins);
  if (count < 100 * cells) {
    throw InvalidArgument("binned_kl_estimate: need at least 100 * bins^d samples, got " +
                          std::to_string(count));
  }
  std::vector<double> q = bin_masses(nu, bins);
  double qs = 0.0;
  for (double v : q) qs += std::max(v, 0.0);
  for (double& v : q) v = std::max(v, 0.0) / qs;

  std::vector<std::size_t> hist(cells, 0);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t b = 0;
    for (int a = 0; a < dim; ++a) {
      const double x = wrap_coordinate(samples[i * dim + a]);
      std::size_t k = static_cast<std::size_t>(x * bins);
      if (k >= static_cast<std::size_t>(bins)) k = static_cast<std::size_t>(bins) - 1;
      b = b * static_cast<std::size_t>(bins) + k;
    }
    ++hist[b];
  }
  const double inv = 1.0 / static_cast<double>(count);
  double kl = 0.0;
  std::size_t nonempty = 0;
  for (std::size_t b = 0; b < cells; ++b) {
    if (hist[b] == 0) continue;
    ++nonempty;
    const double phat = static_cast<double>(hist[b]) * inv;
    if (q[b] <= 0.0) return kInf;
    kl += phat * std::log(phat / q[b]);
  }
  // The plug-in entropy is biased low by (m - 1) / (2M); KL carries -entropy.
  return kl - static_cast<double>(nonempty - 1) / (2.0 * static_cast<double>(count));
}

DvReport dv_check(const std::vector<double>& mu, const std::vector<std::size_t>& subset,
                  int grid_steps) {
  const std::size_t n = mu.size();
  if (n == 0 || n > 4) throw InvalidArgument("dv_check: support size must be 1..4");
  check_probability(mu, "dv_check mu");
  if (grid_steps < 1) throw InvalidArgument("dv_check: grid_steps must be >= 1");
  std::set<std::size_t> a(subset.begin(), subset.end());
  if (a.empty()) throw InvalidArgument("dv_check: A must be nonempty");
  for (std::size_t i : a) {
    if (i >= n) throw InvalidArgument("dv_check: index " + std::to_string(i) + " out of range");
  }
  double mass = 0.0;
  for (std::size_t i : a) mass += mu[i];
  if (!(mass > 0.0)) throw InfiniteLhs("dv_check: mu(A) = 0, so -log mu(A) is infinite");

  DvReport r;
  r.lhs = -std::log(mass);

  // Enumerate compositions of grid_steps over the states of A.
  const std::vector<std::size_t> idx(a.begin(), a.end());
  std::vector<int> parts(idx.size(), 0);
  std::vector<double> nu(n, 0.0);
  r.scan_min = kInf;
  std::vector<double> scan_arg;
  auto visit = [&]() {
    std::fill(nu.begin(), nu.end(), 0.0);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      nu[idx[k]] = static_cast<double>(parts[k]) / grid_steps;
    }
    const double h = entropy_sum(nu, mu);
    if (h < r.scan_min) {
      r.scan_min = h;
      scan_arg = nu;
    }
  };
  // Recursive fill: parts[0..k) fixed, remaining mass to distribute.
  auto rec = [&](auto&& self, std::size_t k, int remaining) -> void {
    if (k + 1 == idx.size()) {
      parts[k] = remaining;
      visit();
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      parts[k] = v;
      self(self, k + 1, remaining - v);
    }
  };
  rec(rec, 0, grid_steps);

  std::vector<double> cond(n, 0.0);
  for (std::size_t i : a) cond[i] = mu[i] / mass;
  r.refined = entropy_sum(cond, mu);
  if (r.refined <= r.scan_min) {
    r.rhs = r.refined;
    r.minimizer = cond;
  } else {
    r.rhs = r.scan_min;
    r.minimizer = scan_arg;
  }
  r.gap = std::abs(r.lhs - r.rhs);
  return r;
}

}  // namespace chaoslab
