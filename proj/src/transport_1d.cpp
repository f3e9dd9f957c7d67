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
#include <array>
#include <cmath>
#include <string>

#include "chaoslab/error.hpp"
#include "chaoslab/transport.hpp"

namespace chaoslab {
namespace {

// A measure on [0, 1) as a sorted list of disjoint pieces: atoms (lo == hi) or
// uniform mass on [lo, hi).
struct Piece {
  double lo;
  double hi;
  double mass;
};

using Circle = std::vector<Piece>;

Circle circle_of(const EmpiricalMeasure& mu) {
  if (mu.dim() != 1) throw InvalidArgument("wasserstein_1d requires d = 1");
  if (mu.size() == 0) throw InvalidArgument("wasserstein_1d: empty measure");
  Circle out;
  const double w = 1.0 / static_cast<double>(mu.size());
  for (double x : mu.coords()) out.push_back({x, x, w});
  std::sort(out.begin(), out.end(), [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
  return out;
}

Circle circle_of(const GridDensity& rho) {
  if (rho.dim != 1) throw InvalidArgument("wasserstein_1d requires d = 1");
  double total = 0.0;
  for (double v : rho.values) total += std::max(v, 0.0);
  if (!(total > 0.0)) throw InvalidArgument("wasserstein_1d: density has no mass");
  const int n = rho.n;
  const double h = 1.0 / n;
  Circle out;
  auto mass = [&](int c) { return std::max(rho.values[static_cast<std::size_t>(c)], 0.0) / total; };
  // Cell 0 straddles the origin: split it.
  if (mass(0) > 0.0) out.push_back({0.0, 0.5 * h, 0.5 * mass(0)});
  for (int c = 1; c < n; ++c) {
    if (mass(c) > 0.0) out.push_back({(c - 0.5) * h, (c + 0.5) * h, mass(c)});
  }
  if (mass(0) > 0.0) out.push_back({1.0 - 0.5 * h, 1.0, 0.5 * mass(0)});
  return out;
}

// Nondecreasing piecewise-linear quantile function on [0, 1), extended by
// Q(t + 1) = Q(t) + 1.
class Quantile {
 public:
  explicit Quantile(const Circle& c) {
    double t = 0.0;
    for (const Piece& p : c) {
      t0_.push_back(t);
      q0_.push_back(p.lo);
      q1_.push_back(p.hi);
      t += p.mass;
      t1_.push_back(t);
    }
    // Absorb the round-off in the total mass.
    const double scale = 1.0 / t;
    for (std::size_t i = 0; i < t0_.size(); ++i) {
      t0_[i] *= scale;
      t1_[i] *= scale;
    }
  }

  double operator()(double t) const {
    const double fl = std::floor(t);
    const double r = t - fl;
    auto it = std::upper_bound(t0_.begin(), t0_.end(), r);
    std::size_t i = it == t0_.begin() ? 0 : static_cast<std::size_t>(it - t0_.begin()) - 1;
    const double len = t1_[i] - t0_[i];
    const double frac = len > 0.0 ? std::clamp((r - t0_[i]) / len, 0.0, 1.0) : 0.0;
    return fl + q0_[i] + frac * (q1_[i] - q0_[i]);
  }

  const std::vector<double>& breaks() const { return t0_; }

 private:
  std::vector<double> t0_, t1_, q0_, q1_;
};

// Cumulative distribution on [0, 1], piecewise linear between piece ends.
class Cdf {
 public:
  explicit Cdf(const Circle& c) : pieces_(c) {
    double acc = 0.0;
    for (const Piece& p : c) {
      before_.push_back(acc);
      acc += p.mass;
    }
    total_ = acc;
  }

  double operator()(double x) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](double v, const Piece& p) { return v < p.lo; });
    if (it == pieces_.begin()) return 0.0;
    const std::size_t i = static_cast<std::size_t>(it - pieces_.begin()) - 1;
    const Piece& p = pieces_[i];
    double inside = p.mass;
    if (p.hi > p.lo && x < p.hi) inside = p.mass * (x - p.lo) / (p.hi - p.lo);
    return (before_[i] + inside) / total_;
  }

  void add_breaks(std::vector<double>& out) const {
    for (const Piece& p : pieces_) {
      out.push_back(p.lo);
      out.push_back(p.hi);
    }
  }

 private:
  Circle pieces_;
  std::vector<double> before_;
  double total_ = 1.0;
};

// int_0^L |D|^p for D linear from d0 to d1.
double integrate_power(double d0, double d1, double len, double p) {
  const double a0 = std::abs(d0);
  const double a1 = std::abs(d1);
  if (d0 * d1 < 0.0) {
    return len * (std::pow(a0, p + 1.0) + std::pow(a1, p + 1.0)) / ((p + 1.0) * (a0 + a1));
  }
  const double spread = std::abs(a1 - a0);
  if (spread <= 1e-3 * std::max(a0, a1)) {
    // Nearly constant: 5-point Gauss-Legendre avoids cancellation.
    static constexpr std::array<double, 5> kNode = {0.0, 0.5384693101056831, -0.5384693101056831,
                                                    0.9061798459386640, -0.9061798459386640};
    static constexpr std::array<double, 5> kWeight = {0.5688888888888889, 0.4786286704993665,
                                                      0.4786286704993665, 0.2369268850561891,
                                                      0.2369268850561891};
    double s = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
      const double d = 0.5 * (d0 + d1) + 0.5 * (d1 - d0) * kNode[k];
      s += kWeight[k] * std::pow(std::abs(d), p);
    }
    return 0.5 * len * s;
  }
  return len * std::abs(std::pow(a1, p + 1.0) - std::pow(a0, p + 1.0)) / ((p + 1.0) * spread);
}

double rotation_cost(const Quantile& qa, const Quantile& qb, double theta, double p) {
  std::vector<double> cuts = qa.breaks();
  for (double t : qb.breaks()) {
    const double s = t - theta;
    cuts.push_back(s - std::floor(s));
  }
  cuts.push_back(0.0);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double len = cuts[k + 1] - cuts[k];
    if (!(len > 0.0)) continue;
    // D is linear between cuts; recover its end values from two interior samples.
    const double ta = cuts[k] + 0.25 * len;
    const double tb = cuts[k] + 0.75 * len;
    const double da = qa(ta) - qb(ta + theta);
    const double db = qa(tb) - qb(tb + theta);
    const double d0 = 1.5 * da - 0.5 * db;
    const double d1 = 1.5 * db - 0.5 * da;
    total += integrate_power(d0, d1, len, p);
  }
  return total;
}

double circle_wp_golden(const Circle& a, const Circle& b, double p) {
  const Quantile qa(a);
  const Quantile qb(b);
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = -1.0;
  double hi = 1.0;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = rotation_cost(qa, qb, x1, p);
  double f2 = rotation_cost(qa, qb, x2, p);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = rotation_cost(qa, qb, x1, p);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = rotation_cost(qa, qb, x2, p);
    }
  }
  return std::pow(std::max(std::min(f1, f2), 0.0), 1.0 / p);
}

struct Segment {
  double len;
  double g0;
  double g1;
};

// Lebesgue measure of {G <= alpha} on a linear segment.
double below(const Segment& s, double alpha) {
  const double lo = std::min(s.g0, s.g1);
  const double hi = std::max(s.g0, s.g1);
  if (alpha >= hi) return s.len;
  if (alpha < lo) return 0.0;
  return s.len * (alpha - lo) / (hi - lo);
}

double abs_integral(const Segment& s, double alpha) {
  const double d0 = s.g0 - alpha;
  const double d1 = s.g1 - alpha;
  if (d0 * d1 >= 0.0) return s.len * std::abs(d0 + d1) * 0.5;
  return s.len * (d0 * d0 + d1 * d1) / (2.0 * (std::abs(d0) + std::abs(d1)));
}

double circle_w1(const Circle& a, const Circle& b) {
  const Cdf fa(a);
  const Cdf fb(b);
  std::vector<double> cuts{0.0, 1.0};
  fa.add_breaks(cuts);
  fb.add_breaks(cuts);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Segment> segs;
  double gmin = 0.0;
  double gmax = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double len = cuts[k + 1] - cuts[k];
    if (!(len > 0.0)) continue;
    const double xa = cuts[k] + 0.25 * len;
    const double xb = cuts[k] + 0.75 * len;
    const double ga = fa(xa) - fb(xa);
    const double gb = fa(xb) - fb(xb);
    const Segment s{len, 1.5 * ga - 0.5 * gb, 1.5 * gb - 0.5 * ga};
    if (segs.empty()) gmin = gmax = s.g0;
    gmin = std::min({gmin, s.g0, s.g1});
    gmax = std::max({gmax, s.g0, s.g1});
    segs.push_back(s);
  }
  // Median of G under Lebesgue measure by bisection on the exact level-set measure.
  double lo = gmin;
  double hi = gmax;
  for (int it = 0; it < 200 && hi > lo; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double m = 0.0;
    for (const Segment& s : segs) m += below(s, mid);
    if (m < 0.5) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double alpha = 0.5 * (lo + hi);
  double total = 0.0;
  for (const Segment& s : segs) total += abs_integral(s, alpha);
  return total;
}

double circle_wp(const Circle& a, const Circle& b, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("wasserstein_1d: p must be >= 1");
  if (p == 1.0) return circle_w1(a, b);
  return circle_wp_golden(a, b, p);
}

}  // namespace

RateBranch rate_branch(double p, int d) {
  const double two_p = 2.0 * p;
  if (two_p > d) return RateBranch::above;
  if (two_p == d) return RateBranch::critical;
  return RateBranch::below;
}

double rate_a_p(double p, int d, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidArgument("rate_a_p: epsilon must be > 0");
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("rate_a_p: p must be >= 1");
  if (d < 1) throw InvalidArgument("rate_a_p: d must be >= 1");
  switch (rate_branch(p, d)) {
    case RateBranch::above:
      return std::pow(epsilon, 2.0 * p);
    case RateBranch::critical: {
      const double l = std::log(2.0 + std::pow(epsilon, -p));
      return std::pow(epsilon, 2.0 * p) / (l * l);
    }
    case RateBranch::below:
      return std::pow(epsilon, static_cast<double>(d));
  }
  return 0.0;
}

EmpiricalMeasure::EmpiricalMeasure(int dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim != 1 && dim != 2) throw InvalidArgument("empirical measure: d must be 1 or 2");
  if (coords_.size() % static_cast<std::size_t>(dim) != 0) {
    throw InvalidArgument("empirical measure: coordinate count not a multiple of d");
  }
  for (double& x : coords_) {
    if (!std::isfinite(x)) throw InvalidArgument("empirical measure: non-finite coordinate");
    x = wrap_coordinate(x);
  }
}

EmpiricalMeasure EmpiricalMeasure::from_points(const std::vector<TorusPoint>& points) {
  if (points.empty()) throw InvalidArgument("empirical measure: no atoms");
  const int dim = points.front().dim();
  std::vector<double> coords;
  for (const TorusPoint& p : points) {
    if (p.dim() != dim) throw InvalidArgument("empirical measure: mixed dimensions");
    for (int a = 0; a < dim; ++a) coords.push_back(p[a]);
  }
  return EmpiricalMeasure(dim, std::move(coords));
}

EmpiricalMeasure EmpiricalMeasure::from_config(const ParticleConfig& config) {
  return EmpiricalMeasure(config.dim, config.interleaved());
}

double wasserstein_1d(const EmpiricalMeasure& mu, const GridDensity& nu, double p) {
  return circle_wp(circle_of(mu), circle_of(nu), p);
}

double wasserstein_1d(const GridDensity& mu, const GridDensity& nu, double p) {
  return circle_wp(circle_of(mu), circle_of(nu), p);
}

double wasserstein_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p) {
  return circle_wp(circle_of(mu), circle_of(nu), p);
}

}  // namespace chaoslab
