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

#include "chaoslab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "chaoslab/error.hpp"

namespace chaoslab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double GridDensity::cell_volume() const {
  const double h = 1.0 / n;
  return dim == 1 ? h : h * h;
}

double GridDensity::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * cell_volume();
}

double GridDensity::min() const { return *std::min_element(values.begin(), values.end()); }
double GridDensity::max() const { return *std::max_element(values.begin(), values.end()); }

Vec GridDensity::node(std::size_t index) const {
  const auto un = static_cast<std::size_t>(n);
  if (dim == 1) return Vec{1, {static_cast<double>(index) / n, 0.0}};
  return Vec{2, {static_cast<double>(index / un) / n, static_cast<double>(index % un) / n}};
}

void GridDensity::validate() const {
  if (dim != 1 && dim != 2) throw InvalidArgument("grid density: d must be 1 or 2");
  if (n < 1) throw InvalidArgument("grid density: n must be positive");
  const std::size_t expect = dim == 1 ? static_cast<std::size_t>(n)
                                      : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  if (values.size() != expect) throw InvalidArgument("grid density: value count != n^d");
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("grid density: non-finite value");
    if (v < -1e-12) throw InvalidArgument("grid density: negative value");
  }
  if (std::abs(mass() - 1.0) > 1e-10) {
    throw InvalidArgument("grid density: mass " + format17(mass()) + " != 1");
  }
}

GridDensity make_grid(int dim, int n) {
  if (dim != 1 && dim != 2) throw InvalidArgument("grid: d must be 1 or 2");
  if (n < 1) throw InvalidArgument("grid: n must be positive");
  GridDensity g;
  g.dim = dim;
  g.n = n;
  const auto un = static_cast<std::size_t>(n);
  g.values.assign(dim == 1 ? un : un * un, 0.0);
  return g;
}

GridDensity uniform_density(int dim, int n) {
  GridDensity g = make_grid(dim, n);
  std::fill(g.values.begin(), g.values.end(), 1.0);
  return g;
}

GridDensity cosine_density(int dim, int n, double amplitude, int wavenumber) {
  if (!(std::abs(amplitude) <= 1.0)) throw InvalidArgument("cosine density: need |amplitude| <= 1");
  if (wavenumber < 1) throw InvalidArgument("cosine density: wavenumber must be >= 1");
  GridDensity g = make_grid(dim, n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double u = static_cast<double>(wavenumber) * g.node(i)[0];
    g.values[i] = 1.0 + amplitude * std::cos(kTwoPi * (u - std::nearbyint(u)));
  }
  return g;
}

GridDensity make_density(const DensitySpec& spec, int dim, int n) {
  if (spec.kind == "uniform") return uniform_density(dim, n);
  if (spec.kind == "cosine") return cosine_density(dim, n, spec.amplitude, spec.wavenumber);
  if (spec.kind == "file") {
    GridDensity g = read_grid_csv(spec.path);
    if (g.dim != dim) throw InvalidArgument("rho0 file: dimension mismatch");
    if (g.n != n) {
      throw InvalidArgument("rho0 file: grid has n=" + std::to_string(g.n) + ", expected " +
                            std::to_string(n));
    }
    g.validate();
    return g;
  }
  throw InvalidArgument("unknown density kind '" + spec.kind + "'");
}

GridDensity heat_flow(const DensitySpec& spec, int dim, int n, double t) {
  if (spec.kind == "file") throw InvalidArgument("heat_flow: no closed form for file densities");
  DensitySpec flowed = spec;
  if (spec.kind == "cosine") {
    const double m = spec.wavenumber;
    flowed.amplitude = spec.amplitude * std::exp(-2.0 * kTwoPi * std::numbers::pi * m * m * t);
  }
  GridDensity g = make_density(flowed, dim, n);
  g.time = t;
  return g;
}

GridDensity histogram_density(const std::vector<double>& coords, int dim, int n) {
  GridDensity g = make_grid(dim, n);
  const std::size_t count = coords.size() / static_cast<std::size_t>(dim);
  if (count == 0) throw InvalidArgument("histogram_density: no points");
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t cell = static_cast<std::size_t>(cell_of(coords[i * dim], n));
    if (dim == 2) {
      cell = cell * static_cast<std::size_t>(n) +
             static_cast<std::size_t>(cell_of(coords[i * 2 + 1], n));
    }
    g.values[cell] += 1.0;
  }
  const double scale = 1.0 / (static_cast<double>(count) * g.cell_volume());
  for (double& v : g.values) v *= scale;
  return g;
}

void write_grid_csv(std::ostream& out, const GridDensity& g) {
  out << "# chaoslab-grid d=" << g.dim << " n=" << g.n << " time=" << format17(g.time) << "\n";
  const auto un = static_cast<std::size_t>(g.n);
  const std::size_t per_row = g.dim == 1 ? 1 : un;
  for (std::size_t r = 0; r < un; ++r) {
    for (std::size_t c = 0; c < per_row; ++c) {
      if (c) out << ',';
      out << format17(g.values[r * per_row + c]);
    }
    out << "\n";
  }
}

void write_grid_csv(const std::string& path, const GridDensity& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_grid_csv(out, g);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

GridDensity read_grid_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw InvalidArgument("grid csv: empty input");
  int dim = 0;
  int n = 0;
  double time = 0.0;
  if (std::sscanf(header.c_str(), "# chaoslab-grid d=%d n=%d time=%lf", &dim, &n, &time) != 3) {
    throw InvalidArgument("grid csv: bad header '" + header + "'");
  }
  GridDensity g = make_grid(dim, n);
  g.time = time;
  std::size_t filled = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      if (filled >= g.size()) throw InvalidArgument("grid csv: too many values");
      g.values[filled++] = std::stod(cell);
    }
  }
  if (filled != g.size()) throw InvalidArgument("grid csv: expected n^d values");
  return g;
}

GridDensity read_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open grid file '" + path + "'");
  return read_grid_csv(in);
}

}  // namespace chaoslab
