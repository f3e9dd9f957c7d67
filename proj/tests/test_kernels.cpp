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
#include <complex>
#include <numbers>
#include <vector>

#include "chaoslab/error.hpp"
#include "chaoslab/kernels.hpp"
#include "chaoslab/spectral.hpp"
#include "doctest.h"

using namespace chaoslab;

namespace {

constexpr double kPi = std::numbers::pi;

KernelSpec spec(KernelFamily f, int dim, double amp = 1.0, int m_trunc = 32) {
  KernelSpec s;
  s.family = f;
  s.dim = dim;
  s.amplitude = amp;
  s.m_trunc = m_trunc;
  return s;
}

Vec v1(double x) { return Vec{1, {x, 0.0}}; }
Vec v2(double x, double y) { return Vec{2, {x, y}}; }

// Visits every node of the res^d grid.
template <class Fn>
void for_grid(int dim, int res, Fn fn) {
  for (int a = 0; a < res; ++a) {
    if (dim == 1) {
      fn(v1(static_cast<double>(a) / res));
      continue;
    }
    for (int b = 0; b < res; ++b) fn(v2(static_cast<double>(a) / res, static_cast<double>(b) / res));
  }
}

double sup_on_grid(const Kernel& k, int res) {
  double m = 0.0;
  for_grid(k.dim(), res, [&](const Vec& x) { m = std::max(m, eval_kernel(k, x).norm()); });
  return m;
}

std::vector<Kernel> builtins() {
  std::vector<Kernel> out;
  for (int dim : {1, 2}) {
    out.emplace_back(spec(KernelFamily::zero, dim));
    KernelSpec st = spec(KernelFamily::smooth_trig, dim);
    st.amplitudes = {1.0, -0.5, 0.25};
    out.emplace_back(st);
    KernelSpec gp = spec(KernelFamily::gradient_of_potential, dim, 0.3);
    gp.wavenumber = 2;
    out.emplace_back(gp);
  }
  out.emplace_back(spec(KernelFamily::biot_savart_2d, 2, 1.0, 16));
  return out;
}

}  // namespace

TEST_CASE("family names round-trip") {
  for (auto f : {KernelFamily::zero, KernelFamily::smooth_trig, KernelFamily::biot_savart_2d,
                 KernelFamily::gradient_of_potential}) {
    CHECK(parse_kernel_family(family_name(f)) == f);
  }
  CHECK_THROWS_AS(parse_kernel_family("coulomb"), InvalidArgument);
  for (auto f : {DriftFamily::zero, DriftFamily::constant, DriftFamily::trig_potential}) {
    CHECK(parse_drift_family(family_name(f)) == f);
  }
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(Kernel(spec(KernelFamily::biot_savart_2d, 1)), InvalidArgument);
  CHECK_THROWS_AS(Kernel(spec(KernelFamily::biot_savart_2d, 2, 1.0, 0)), InvalidArgument);
  CHECK_THROWS_AS(Kernel(spec(KernelFamily::zero, 3)), InvalidArgument);
  KernelSpec neg = spec(KernelFamily::smooth_trig, 1);
  neg.delta = -0.1;
  CHECK_THROWS_AS(Kernel{neg}, InvalidArgument);
  CHECK_THROWS_AS(mollify(Kernel(spec(KernelFamily::zero, 1)), 0.0), InvalidArgument);
  CHECK_THROWS_AS(mollify(Kernel(spec(KernelFamily::zero, 1)), -1.0), InvalidArgument);
}

TEST_CASE("eval_kernel examples") {
  const Kernel zero(spec(KernelFamily::zero, 2));
  const Vec z = eval_kernel(zero, v2(0.3, 0.8));
  CHECK(z[0] == 0.0);
  CHECK(z[1] == 0.0);

  const Kernel st(spec(KernelFamily::smooth_trig, 1));
  CHECK(std::abs(eval_kernel(st, v1(0.25))[0] - 1.0) < 1e-15);
  CHECK(std::abs(eval_kernel(st, v1(0.1))[0] - std::sin(2 * kPi * 0.1)) < 1e-15);

  const Kernel bs(spec(KernelFamily::biot_savart_2d, 2, 1.0, 32));
  for (const Vec& x : {v2(0.1, 0.2), v2(0.37, -0.41), v2(0.05, 0.0)}) {
    const Vec a = eval_kernel(bs, x);
    const Vec b = eval_kernel(bs, -x);
    CHECK(std::abs(a[0] + b[0]) < 1e-12);
    CHECK(std::abs(a[1] + b[1]) < 1e-12);
  }
}

TEST_CASE("gradient_of_potential matches -grad W by central differences") {
  KernelSpec s = spec(KernelFamily::gradient_of_potential, 2, 0.7);
  s.wavenumber = 3;
  const Kernel k(s);
  auto w = [&](double x, double y) {
    return 0.7 * (std::cos(2 * kPi * 3 * x) + std::cos(2 * kPi * 3 * y));
  };
  const double h = 1e-6;
  for (const Vec& x : {v2(0.1, 0.2), v2(0.77, 0.05)}) {
    const Vec kv = eval_kernel(k, x);
    const double gx = (w(x[0] + h, x[1]) - w(x[0] - h, x[1])) / (2 * h);
    const double gy = (w(x[0], x[1] + h) - w(x[0], x[1] - h)) / (2 * h);
    CHECK(std::abs(kv[0] + gx) < 1e-7);
    CHECK(std::abs(kv[1] + gy) < 1e-7);
  }
}

TEST_CASE("drift families") {
  DriftSpec c;
  c.family = DriftFamily::constant;
  c.dim = 2;
  c.value = v2(0.3, -1.2);
  const Drift fc(c);
  const Vec out = fc.series().eval(v2(0.9, 0.1));
  CHECK(out[0] == doctest::Approx(0.3));
  CHECK(out[1] == doctest::Approx(-1.2));

  DriftSpec t;
  t.family = DriftFamily::trig_potential;
  t.dim = 1;
  t.amplitude = 0.2;
  t.wavenumber = 2;
  const Drift ft(t);
  // F = -U', U = 0.2 cos(4 pi x)
  CHECK(std::abs(ft.series().eval(v1(0.1))[0] - 0.2 * 4 * kPi * std::sin(4 * kPi * 0.1)) < 1e-13);
  CHECK(Drift().series().empty());
}

TEST_CASE("vortex kernel approaches the free-space kernel near the origin") {
  // Free-space x^perp / (2 pi |x|^2) at x = (0.05, 0) is (0, 1/(0.1 pi)).
  const Vec x = v2(0.05, 0.0);
  const double free_y = 1.0 / (2 * kPi * 0.05);
  for (int mt : {64, 128, 256}) {
    const Vec k = eval_kernel(Kernel(spec(KernelFamily::biot_savart_2d, 2, 1.0, mt)), x);
    const double dev = std::hypot(k[0], k[1] - free_y) / free_y;
    MESSAGE("m_trunc=" << mt << " truncated series relative deviation " << dev);
    CHECK(dev < 0.15);
  }
  // The mollified kernel at delta = 0.01 is resolved at m_trunc = 256 and
  // differs from the free-space kernel by the periodic correction x^perp / 2.
  KernelSpec s = spec(KernelFamily::biot_savart_2d, 2, 1.0, 256);
  s.delta = 0.01;
  const Vec km = eval_kernel(Kernel(s), x);
  const double moll = 1.0 - std::exp(-0.05 * 0.05 / (2 * 0.01 * 0.01));
  const double dev = std::hypot(km[0], km[1] - moll * free_y) / free_y;
  MESSAGE("mollified relative deviation " << dev);
  CHECK(dev < 0.02);
}

TEST_CASE("built-in kernels: zero mean, antisymmetry, divergence") {
  for (const Kernel& k : builtins()) {
    CAPTURE(family_name(k.spec().family));
    CAPTURE(k.dim());
    const int res = 64;
    Vec sum = Vec::zeros(k.dim());
    double antisym = 0.0;
    for_grid(k.dim(), res, [&](const Vec& x) {
      const Vec a = eval_kernel(k, x);
      const Vec b = eval_kernel(k, -x);
      sum = sum + a;
      antisym = std::max(antisym, (a + b).norm());
    });
    const double cells = std::pow(res, k.dim());
    CHECK(std::abs(sum[0] / cells) < 1e-10);
    CHECK(std::abs(sum[1] / cells) < 1e-10);
    CHECK(antisym < 1e-12);
    CHECK(k.series().is_odd());
  }
  const Kernel bs(spec(KernelFamily::biot_savart_2d, 2, 2.5, 32));
  double div = 0.0;
  std::size_t count = 0;
  for (int k1 = -32; k1 <= 32; ++k1) {
    for (int k2 = -32; k2 <= 32; ++k2) {
      const ComplexVec c = bs.series().coefficient({k1, k2});
      const std::complex<double> d = 2.0 * kPi * std::complex<double>(0, 1) *
                                     (static_cast<double>(k1) * c[0] + static_cast<double>(k2) * c[1]);
      div = std::max(div, std::abs(d));
      if (std::abs(c[0]) + std::abs(c[1]) > 0) ++count;
    }
  }
  CHECK(count == 65u * 65u - 1u);
  CHECK(div < 1e-10);
}

TEST_CASE("vortex coefficients follow the spectral definition") {
  const double amp = 1.5;
  const Kernel bs(spec(KernelFamily::biot_savart_2d, 2, amp, 8));
  const std::complex<double> i(0, 1);
  for (int k1 = -8; k1 <= 8; ++k1) {
    for (int k2 = -8; k2 <= 8; ++k2) {
      const ComplexVec c = bs.series().coefficient({k1, k2});
      if (k1 == 0 && k2 == 0) {
        CHECK(std::abs(c[0]) == 0.0);
        continue;
      }
      const double k2n = 4 * kPi * kPi * (k1 * k1 + k2 * k2);
      // -amp (2 pi i k)^perp / |2 pi k|^2 with (a, b)^perp = (-b, a)
      const std::complex<double> e0 = -amp * (-(2 * kPi * i * static_cast<double>(k2))) / k2n;
      const std::complex<double> e1 = -amp * (2 * kPi * i * static_cast<double>(k1)) / k2n;
      CHECK(std::abs(c[0] - e0) < 1e-14);
      CHECK(std::abs(c[1] - e1) < 1e-14);
    }
  }
  // No mode outside |k|_inf <= m_trunc.
  CHECK(std::abs(bs.series().coefficient({9, 0})[1]) == 0.0);
  CHECK(bs.series().max_wavenumber() == 8);
}

TEST_CASE("mollify examples") {
  const Kernel mz = mollify(Kernel(spec(KernelFamily::zero, 1)), 0.1);
  CHECK(eval_kernel(mz, v1(0.3))[0] == 0.0);

  // Oracle: direct periodic convolution with the Gaussian of variance delta^2
  // on a 1024-point grid.
  const double amp = 1.3;
  for (double delta : {0.05, 0.1}) {
    const Kernel k = mollify(Kernel(spec(KernelFamily::smooth_trig, 1, amp)), delta);
    const int n = 1024;
    std::vector<double> g(n);
    for (int j = 0; j < n; ++j) {
      const double y = static_cast<double>(j) / n;
      double s = 0.0;
      for (int m = -5; m <= 5; ++m) {
        const double z = y + m;
        s += std::exp(-z * z / (2 * delta * delta));
      }
      g[j] = s / (std::sqrt(2 * kPi) * delta);
    }
    double worst = 0.0;
    double closed = 0.0;
    for (double x : {0.0, 0.13, 0.25, 0.61, 0.9}) {
      double conv = 0.0;
      for (int j = 0; j < n; ++j) {
        conv += amp * std::sin(2 * kPi * (x - static_cast<double>(j) / n)) * g[j] / n;
      }
      const double got = eval_kernel(k, v1(x))[0];
      worst = std::max(worst, std::abs(got - conv));
      closed = std::max(closed, std::abs(got - amp * std::exp(-2 * kPi * kPi * delta * delta) *
                                                   std::sin(2 * kPi * x)));
    }
    CHECK(worst < 1e-8);
    CHECK(closed < 1e-14);
  }

  // Widths compose in quadrature.
  const Kernel base(spec(KernelFamily::smooth_trig, 1));
  const Kernel twice = mollify(mollify(base, 0.03), 0.04);
  CHECK(std::abs(twice.spec().delta - 0.05) < 1e-15);
}

TEST_CASE("mollification contracts the sup norm and converges in L2") {
  for (const Kernel& k : builtins()) {
    for (double delta : {0.01, 0.05, 0.2}) {
      CHECK(sup_on_grid(mollify(k, delta), 64) <= sup_on_grid(k, 64) + 1e-12);
    }
  }
  const Kernel bs(spec(KernelFamily::biot_savart_2d, 2, 1.0, 32));
  const int n = 256;
  const auto base = synthesize(bs.series(), n);
  double previous = 1e300;
  for (double delta : {0.2, 0.1, 0.05}) {
    const auto moll = synthesize(mollify(bs, delta).series(), n);
    double l2 = 0.0;
    for (int a = 0; a < 2; ++a) {
      for (std::size_t i = 0; i < base[a].size(); ++i) {
        const double d = moll[a][i] - base[a][i];
        l2 += d * d;
      }
    }
    l2 = std::sqrt(l2 / (n * n));
    CHECK(l2 < previous);
    previous = l2;
  }
}

TEST_CASE("primitive matrix") {
  const PrimitiveMatrix vz = primitive_matrix(Kernel(spec(KernelFamily::zero, 2)));
  CHECK(vz.modes().empty());
  CHECK(vz.eval(v2(0.3, 0.4)).frobenius() == 0.0);
  CHECK(wminus_norm_surrogate(vz, 16) == 0.0);

  const PrimitiveMatrix v1d = primitive_matrix(Kernel(spec(KernelFamily::smooth_trig, 1)));
  for (double x : {0.0, 0.1, 0.4, 0.75}) {
    CHECK(std::abs(v1d.eval(v1(x))(0, 0) + std::cos(2 * kPi * x) / (2 * kPi)) < 1e-15);
  }
  double prev = 0.0;
  for (int res : {16, 64, 256}) {
    const double s = wminus_norm_surrogate(v1d, res);
    CHECK(s >= prev - 1e-15);
    prev = s;
  }
  CHECK(std::abs(prev - 1.0 / (2 * kPi)) < 1e-12);

  const Kernel bs(spec(KernelFamily::biot_savart_2d, 2, 1.0, 24));
  const PrimitiveMatrix v = primitive_matrix(bs);
  const std::complex<double> i(0, 1);
  double err = 0.0;
  for (int k1 = -24; k1 <= 24; ++k1) {
    for (int k2 = -24; k2 <= 24; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const auto vh = v.coefficient({k1, k2});
      const ComplexVec kh = bs.series().coefficient({k1, k2});
      for (int r = 0; r < 2; ++r) {
        const std::complex<double> div =
            2 * kPi * i * (static_cast<double>(k1) * vh[r * 2] + static_cast<double>(k2) * vh[r * 2 + 1]);
        err = std::max(err, std::abs(div - kh[r]));
      }
      // V_hat(k) = K_hat(k) (x) (-2 pi i k) / |2 pi k|^2
      const double k2n = 4 * kPi * kPi * (k1 * k1 + k2 * k2);
      for (int r = 0; r < 2; ++r) {
        CHECK(std::abs(vh[r * 2] - kh[r] * (-2.0 * kPi * i * static_cast<double>(k1)) / k2n) < 1e-14);
        CHECK(std::abs(vh[r * 2 + 1] - kh[r] * (-2.0 * kPi * i * static_cast<double>(k2)) / k2n) <
              1e-14);
      }
    }
  }
  CHECK(err < 1e-10);
  CHECK(std::abs(v.coefficient({0, 0})[0]) == 0.0);
  CHECK(wminus_norm_surrogate(v, 64) <= wminus_norm_surrogate(v, 256) + 1e-12);
  CHECK_THROWS_AS(wminus_norm_surrogate(v, 8), InvalidArgument);
}
