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

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "chaoslab/error.hpp"
#include "chaoslab/simd.hpp"
#include "chaoslab/transport.hpp"

namespace chaoslab {
namespace {

// Cost rows and columns; materialized when small, recomputed otherwise.
class CostMatrix {
 public:
  CostMatrix(const WeightedCloud& a, const WeightedCloud& b, double p)
      : a_(a), b_(b), p_(p), stored_(a.size() * b.size() <= (std::size_t{1} << 22)) {
    if (stored_) {
      rows_.resize(a.size() * b.size());
      cols_.resize(a.size() * b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
          const double c = entry(i, j);
          rows_[i * b.size() + j] = c;
          cols_[j * a.size() + i] = c;
        }
      }
    }
  }

  const double* row(std::size_t i, std::vector<double>& buf) const {
    if (stored_) return rows_.data() + i * b_.size();
    buf.resize(b_.size());
    for (std::size_t j = 0; j < b_.size(); ++j) buf[j] = entry(i, j);
    return buf.data();
  }

  const double* col(std::size_t j, std::vector<double>& buf) const {
    if (stored_) return cols_.data() + j * a_.size();
    buf.resize(a_.size());
    for (std::size_t i = 0; i < a_.size(); ++i) buf[i] = entry(i, j);
    return buf.data();
  }

 private:
  double entry(std::size_t i, std::size_t j) const {
    const int dim = a_.dim;
    const double d2 = torus_distance_sq(a_.coords.data() + i * dim, b_.coords.data() + j * dim, dim);
    return p_ == 2.0 ? d2 : std::pow(std::sqrt(d2), p_);
  }

  const WeightedCloud& a_;
  const WeightedCloud& b_;
  double p_;
  bool stored_;
  std::vector<double> rows_;
  std::vector<double> cols_;
};

void check_cloud(const WeightedCloud& c) {
  if (c.size() == 0) throw InvalidArgument("sinkhorn: empty measure");
  if (c.coords.size() != c.size() * static_cast<std::size_t>(c.dim)) {
    throw InvalidArgument("sinkhorn: coordinate count mismatch");
  }
  for (double w : c.weights) {
    if (!(w > 0.0)) throw InvalidArgument("sinkhorn: weights must be positive");
  }
}

}  // namespace

WeightedCloud WeightedCloud::from_measure(const EmpiricalMeasure& mu) {
  WeightedCloud c;
  c.dim = mu.dim();
  c.coords = mu.coords();
  c.weights.assign(mu.size(), 1.0 / static_cast<double>(mu.size()));
  return c;
}

WeightedCloud WeightedCloud::from_grid(const GridDensity& rho) {
  WeightedCloud c;
  c.dim = rho.dim;
  double total = 0.0;
  for (double v : rho.values) total += std::max(v, 0.0);
  if (!(total > 0.0)) throw InvalidArgument("sinkhorn: density has no mass");
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho.values[i] > 0.0)) continue;
    const Vec x = rho.node(i);
    for (int a = 0; a < rho.dim; ++a) c.coords.push_back(x[a]);
    c.weights.push_back(rho.values[i] / total);
  }
  return c;
}

double entropic_ot(const WeightedCloud& a, const WeightedCloud& b, double p, double reg,
                   const SinkhornOptions& options) {
  check_cloud(a);
  check_cloud(b);
  if (a.dim != b.dim) throw InvalidArgument("sinkhorn: dimension mismatch");
  if (!(reg > 0.0) || !std::isfinite(reg)) throw InvalidArgument("sinkhorn: reg must be > 0");
  if (!(p >= 1.0)) throw InvalidArgument("sinkhorn: p must be >= 1");

  const auto& t = simd::active();
  const bool symmetric = &a == &b;
  const CostMatrix cost(a, b, p);
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<double> log_a(n);
  std::vector<double> log_b(m);
  for (std::size_t i = 0; i < n; ++i) log_a[i] = std::log(a.weights[i]);
  for (std::size_t j = 0; j < m; ++j) log_b[j] = std::log(b.weights[j]);
  std::vector<double> f(n, 0.0);
  std::vector<double> g(m, 0.0);
  std::vector<double> h;
  std::vector<double> buf;
  std::vector<double> f_new(n);

  // Alternating log-domain updates at regularization eps until the marginal
  // residual drops below tol; returns the final residual.
  auto iterate = [&](double eps, double tol, int max_iters) {
    const double inv = 1.0 / eps;
    double residual = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iters; ++it) {
      // f-update against the current g; the size of the change measures how
      // far the first marginal is from a.
      const std::vector<double>& gg = symmetric ? f : g;
      h.resize(m);
      for (std::size_t j = 0; j < m; ++j) h[j] = log_b[j] + gg[j] * inv;
      for (std::size_t i = 0; i < n; ++i) {
        f_new[i] = -eps * t.logsumexp(cost.row(i, buf), h.data(), inv, m);
      }
      residual = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        residual += a.weights[i] * std::abs(std::expm1((f[i] - f_new[i]) * inv));
      }
      if (symmetric) {
        for (std::size_t i = 0; i < n; ++i) f[i] = 0.5 * (f[i] + f_new[i]);
      } else {
        f.swap(f_new);
      }
      if (!std::isfinite(residual)) return residual;
      if (!symmetric) {
        h.resize(n);
        for (std::size_t i = 0; i < n; ++i) h[i] = log_a[i] + f[i] * inv;
        for (std::size_t j = 0; j < m; ++j) {
          g[j] = -eps * t.logsumexp(cost.col(j, buf), h.data(), inv, n);
        }
      }
      if (it > 0 && residual < tol) return residual;
    }
    return residual;
  };

  // Warm start by halving the regularization from the cost scale down to reg.
  double scale = 0.0;
  std::vector<double> row_buf;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = cost.row(i, row_buf);
    for (std::size_t j = 0; j < m; ++j) scale = std::max(scale, row[j]);
  }
  for (double eps = 0.5 * scale; eps > 2.0 * reg; eps *= 0.5) iterate(eps, 1e-4, 200);

  const double residual = iterate(reg, options.tolerance, options.max_iters);
  if (std::isfinite(residual) && residual < options.tolerance) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a.weights[i] * f[i];
    if (symmetric) return 2.0 * s;
    for (std::size_t j = 0; j < m; ++j) s += b.weights[j] * g[j];
    return s;
  }
  std::ostringstream msg;
  msg << "sinkhorn did not converge in " << options.max_iters
      << " iterations (marginal residual " << residual << ", reg " << reg << ")";
  throw NumericalFailure(msg.str());
}

double sinkhorn_distance(const WeightedCloud& a, const WeightedCloud& b, double p, double reg,
                         const SinkhornOptions& options) {
  const double ab = entropic_ot(a, b, p, reg, options);
  const double aa = entropic_ot(a, a, p, reg, options);
  const double bb = entropic_ot(b, b, p, reg, options);
  const double s = ab - 0.5 * aa - 0.5 * bb;
  return std::pow(std::max(s, 0.0), 1.0 / p);
}

double wasserstein_sinkhorn(const EmpiricalMeasure& mu, const GridDensity& nu, double p,
                            double reg, const SinkhornOptions& options) {
  if (mu.dim() != 2 || nu.dim != 2) throw InvalidArgument("wasserstein_sinkhorn requires d = 2");
  return sinkhorn_distance(WeightedCloud::from_measure(mu), WeightedCloud::from_grid(nu), p, reg,
                           options);
}

double calibrated_reg(const EmpiricalMeasure& mu, double /*p*/) {
  const std::size_t n = mu.size();
  if (n < 2) throw InvalidArgument("calibrated_reg: need at least 2 atoms");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) best = std::min(best, torus_distance_sq(mu.atom(i), mu.atom(j), mu.dim()));
    }
    total += std::sqrt(best);
  }
  const double spacing = total / static_cast<double>(n);
  if (!(spacing > 0.0)) throw InvalidArgument("calibrated_reg: coincident atoms");
  return 0.5 * spacing * spacing;
}

}  // namespace chaoslab
