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

// Acceptance suite: one PASS/FAIL line per criterion A1-A8.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include "CLI11.hpp"
#include "chaoslab/cli.hpp"
#include "chaoslab/entropy.hpp"
#include "chaoslab/harness.hpp"
#include "chaoslab/kernels.hpp"
#include "chaoslab/meanfield.hpp"
#include "chaoslab/spectral.hpp"
#include "chaoslab/transport.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace chaoslab;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// ---------------------------------------------------------------- A1

Outcome a1_rate_function() {
  int cases = 0;
  int bad = 0;
  double worst = 0.0;
  for (double p : {1.0, 1.5, 2.0}) {
    for (int d = 1; d <= 4; ++d) {
      for (double eps : {0.05, 0.1, 0.2}) {
        ++cases;
        const double twice_p = 2 * p;
        double expect = 0.0;
        RateBranch branch;
        if (twice_p > d) {
          expect = std::pow(eps, 2 * p);
          branch = RateBranch::above;
        } else if (twice_p == d) {
          const double l = std::log(2.0 + 1.0 / std::pow(eps, p));
          expect = std::pow(eps, 2 * p) / (l * l);
          branch = RateBranch::critical;
        } else {
          expect = std::pow(eps, d);
          branch = RateBranch::below;
        }
        const double got = rate_a_p(p, d, eps);
        const double err = std::abs(got - expect) / expect;
        worst = std::max(worst, err);
        if (rate_branch(p, d) != branch || err > 1e-12) ++bad;
      }
    }
  }
  return {bad == 0, std::to_string(cases - bad) + "/" + std::to_string(cases) +
                        " cases, max rel err " + fmt(worst) + " (tol 1e-12)"};
}

// ---------------------------------------------------------------- A2

Outcome a2_pde_solver() {
  const double a = 0.5;
  KernelSpec zero;
  const PdeTrajectory heat = solve_pde(cosine_density(1, 128, a, 1), Kernel(zero), Drift(), 0.1, 1e-3);
  const GridDensity& end = heat.checkpoints.back();
  double mode = 0.0;
  for (std::size_t i = 0; i < end.size(); ++i) {
    mode += std::cos(2 * kPi * end.node(i)[0]) * end.values[i];
  }
  mode *= 2.0 * end.cell_volume();
  const double exact = a * std::exp(-4 * kPi * kPi * 0.1);
  const double rel = std::abs(mode - exact) / exact;

  KernelSpec st;
  st.family = KernelFamily::smooth_trig;
  const PdeTrajectory run = solve_pde(cosine_density(1, 256, a, 1), Kernel(st), Drift(), 0.5, 0.5 / 400);
  const double drift = run.stats.max_mass_error;

  double steady = 0.0;
  for (int dim : {1, 2}) {
    KernelSpec ks = st;
    ks.dim = dim;
    DriftSpec ds;
    ds.dim = dim;
    const int n = dim == 1 ? 128 : 64;
    GridDensity u = uniform_density(dim, n);
    MeanFieldSolver solver(Kernel(ks), Drift(ds), dim, n);
    for (int s = 0; s < 100; ++s) solver.step(u, 1e-3);
    for (double v : u.values) steady = std::max(steady, std::abs(v - 1.0));
  }
  const bool pass = rel < 1e-6 && drift < 1e-9 && steady < 1e-12 && run.stats.clamp_events == 0;
  return {pass, "heat-mode rel err " + fmt(rel) + " (tol 1e-6), mass drift " + fmt(drift) +
                    " (tol 1e-9), steady-state dev " + fmt(steady) + " (tol 1e-12), clamps " +
                    std::to_string(run.stats.clamp_events)};
}

// ---------------------------------------------------------------- A3

EmpiricalMeasure random_measure(std::mt19937_64& gen, int dim, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> c(n * static_cast<std::size_t>(dim));
  for (double& v : c) v = u(gen);
  return EmpiricalMeasure(dim, std::move(c));
}

Outcome a3_ot_oracles() {
  std::mt19937_64 gen(20260101);
  double worst_1d = 0.0;
  for (double p : {1.0, 2.0}) {
    for (int t = 0; t < 100; ++t) {
      const auto mu = random_measure(gen, 1, 16);
      const auto nu = random_measure(gen, 1, 16);
      worst_1d = std::max(worst_1d, std::abs(wasserstein_1d(mu, nu, p) - wasserstein_exact_small(mu, nu, p)));
    }
  }
  double worst_sk = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto mu = random_measure(gen, 2, 8);
    const auto nu = random_measure(gen, 2, 8);
    const double s = sinkhorn_distance(WeightedCloud::from_measure(mu), WeightedCloud::from_measure(nu),
                                       1.0, calibrated_reg(mu, 1.0));
    const double exact = wasserstein_exact_small(mu, nu, 1.0);
    worst_sk = std::max(worst_sk, std::abs(s - exact) / exact);
  }
  return {worst_1d < 1e-9 && worst_sk < 0.05,
          "1-D vs assignment max abs diff " + fmt(worst_1d) + " over 200 instances (tol 1e-9); " +
              "Sinkhorn max rel err " + fmt(worst_sk) + " over 50 instances (tol 0.05)"};
}

// ---------------------------------------------------------------- A4

Outcome a4_donsker_varadhan() {
  std::mt19937_64 gen(424242);
  std::exponential_distribution<double> e(1.0);
  double worst_gap = 0.0;
  double worst_beat = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + gen() % 3;
    std::vector<double> mu(n);
    double s = 0.0;
    for (double& x : mu) s += (x = e(gen));
    for (double& x : mu) x /= s;
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < n; ++i) {
      if (gen() % 2) subset.push_back(i);
    }
    if (subset.empty()) subset.push_back(gen() % n);
    const DvReport r = dv_check(mu, subset, n == 4 ? 60 : 200);
    worst_gap = std::max(worst_gap, r.gap);
    worst_beat = std::max(worst_beat, r.refined - r.scan_min);
  }
  return {worst_gap < 1e-9 && worst_beat <= 1e-9,
          "max gap " + fmt(worst_gap) + " (tol 1e-9), max scan undercut " + fmt(worst_beat) +
              " (tol 1e-9), 50 instances"};
}

// ---------------------------------------------------------------- A5

ExperimentPlan entropy_plan(KernelFamily family) {
  ExperimentPlan plan;
  plan.dim = 1;
  plan.grid_n = 256;
  plan.horizon = 0.5;
  plan.dt = 0.5 / 400;
  plan.pde_dt = 0.5 / 400;
  plan.kernel.family = family;
  plan.kernel.amplitude = 1.0;
  plan.n_list = {64, 128, 256, 512};
  plan.epsilon_list = {1.0};
  plan.replicas = 20000;
  plan.seed = 2026;
  plan.bins = 32;
  return plan;
}

Outcome a5_entropy_decay(int workers) {
  const EntropySweep sweep = entropy_decay_sweep(entropy_plan(KernelFamily::smooth_trig), workers);
  const EntropySweep null = entropy_decay_sweep(entropy_plan(KernelFamily::zero), workers);
  std::string kls;
  for (const auto& pt : sweep.points) kls += " " + std::to_string(pt.n) + ":" + fmt(pt.kl);
  double null_max = 0.0;
  for (const auto& pt : null.points) null_max = std::max(null_max, std::abs(pt.kl));
  const bool slope_ok = sweep.fit.ok && sweep.fit.slope >= -1.4 && sweep.fit.slope <= -0.6;
  std::string slope = sweep.fit.ok ? fmt(sweep.fit.slope) : "none (" + sweep.fit.note + ")";
  return {slope_ok && null_max < 5e-4, "log-log slope " + slope + " (band [-1.4,-0.6]); kl" + kls +
                                           "; null max |kl| " + fmt(null_max) + " (tol 5e-4)"};
}

// ---------------------------------------------------------------- A6

ExperimentPlan default_plan(SamplingMode mode) {
  ExperimentPlan plan;
  plan.dim = 1;
  plan.grid_n = 256;
  plan.horizon = 0.5;
  plan.dt = 0.5 / 400;
  plan.pde_dt = 0.5 / 400;
  plan.kernel.family = KernelFamily::smooth_trig;
  plan.kernel.amplitude = 1.0;
  plan.n_list = {64, 128, 256, 512};
  plan.epsilon_list = {0.05, 0.1, 0.2};
  plan.p = 1.0;
  plan.replicas = 2000;
  plan.mode = mode;
  plan.seed = 2026;
  return plan;
}

struct ShapeResult {
  bool nested = true;
  bool fits_ok = true;      // (ii)
  bool monotone = true;     // (iii)
  std::map<double, double> slopes;
  std::string text;
};

ShapeResult check_shape(const ExperimentPlan& plan, const ConcentrationRun& run) {
  ShapeResult res;
  const std::size_t ne = plan.epsilon_list.size();
  for (std::size_t ni = 0; ni < plan.n_list.size(); ++ni) {
    for (std::size_t r = 0; r < run.distances[ni].size(); ++r) {
      const double d = run.distances[ni][r];
      for (std::size_t e = 1; e < ne; ++e) {
        // {d > eps2} must be contained in {d > eps1}.
        if (d > plan.epsilon_list[e] && !(d > plan.epsilon_list[e - 1])) res.nested = false;
      }
    }
    for (std::size_t e = 0; e < ne; ++e) {
      const auto& rec = run.records[ni * ne + e];
      int direct = 0;
      for (double d : run.distances[ni]) direct += d > plan.epsilon_list[e] ? 1 : 0;
      if (rec.exceed_count != direct) res.nested = false;
      if (e > 0 && rec.exceed_count > run.records[ni * ne + e - 1].exceed_count) res.nested = false;
    }
  }
  std::ostringstream text;
  for (std::size_t e = 0; e < ne; ++e) {
    std::vector<ConcentrationRecord> group;
    text << " eps=" << plan.epsilon_list[e] << " p_hat[";
    for (std::size_t ni = 0; ni < plan.n_list.size(); ++ni) {
      group.push_back(run.records[ni * ne + e]);
      text << (ni ? "," : "") << fmt(group.back().p_hat);
    }
    text << "]";
    int usable = 0;
    for (const auto& r : group) usable += (r.p_hat > 0.0 && r.p_hat < 1.0) ? 1 : 0;
    if (usable < 3) {
      text << " fit=degenerate(" << usable << " usable)";
      continue;
    }
    const RateFit fit = fit_exponential_rate(group);
    text << " slope=" << fmt(fit.slope) << " r2=" << fmt(fit.r2);
    if (!(fit.slope > 0.0 && fit.r2 > 0.85)) res.fits_ok = false;
    res.slopes[plan.epsilon_list[e]] = fit.slope;
  }
  double prev = -INFINITY;
  for (const auto& [eps, slope] : res.slopes) {
    if (slope < prev) res.monotone = false;
    prev = slope;
  }
  res.text = text.str();
  return res;
}

Outcome a6_concentration_shape(int workers) {
  const ExperimentPlan pp = default_plan(SamplingMode::particle);
  const ExperimentPlan ip = default_plan(SamplingMode::iid_baseline);
  const ShapeResult part = check_shape(pp, run_concentration(pp, workers));
  const ShapeResult iid = check_shape(ip, run_concentration(ip, workers));
  std::string ratios;
  bool ratio_ok = true;
  int compared = 0;
  for (const auto& [eps, s] : part.slopes) {
    const auto it = iid.slopes.find(eps);
    if (it == iid.slopes.end()) continue;
    ++compared;
    const double ratio = s / it->second;
    ratios += " eps=" + fmt(eps) + ":" + fmt(ratio);
    if (!(ratio >= 0.2 && ratio <= 5.0)) ratio_ok = false;
  }
  // Comparability needs at least one epsilon fitted in both modes.
  if (compared == 0) ratio_ok = false;
  const bool pass = part.nested && iid.nested && part.fits_ok && part.monotone && iid.fits_ok &&
                    iid.monotone && ratio_ok;
  std::string detail = std::string("(i) nesting ") + (part.nested && iid.nested ? "ok" : "BROKEN") +
                       "; particle" + part.text + "; iid" + iid.text + "; (ii) " +
                       (part.fits_ok && iid.fits_ok ? "ok" : "fail") + " (iii) " +
                       (part.monotone && iid.monotone ? "ok" : "fail") + " (iv) ratios" +
                       (ratios.empty() ? " none comparable" : ratios);
  return {pass, detail};
}

// ---------------------------------------------------------------- A7

Outcome a7_kernel_bank() {
  KernelSpec spec;
  spec.family = KernelFamily::biot_savart_2d;
  spec.dim = 2;
  const Kernel bs(spec);
  const int m = spec.m_trunc;

  double antisym = 0.0;
  for (int a = 0; a < 64; ++a) {
    for (int b = 0; b < 64; ++b) {
      const Vec x{2, {a / 64.0, b / 64.0}};
      antisym = std::max(antisym, (eval_kernel(bs, x) + eval_kernel(bs, -x)).norm());
    }
  }

  const std::complex<double> i(0, 1);
  const PrimitiveMatrix v = primitive_matrix(bs);
  double div = 0.0;
  double roundtrip = 0.0;
  for (int k1 = -m; k1 <= m; ++k1) {
    for (int k2 = -m; k2 <= m; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const ComplexVec c = bs.series().coefficient({k1, k2});
      div = std::max(div, std::abs(2 * kPi * i * (double(k1) * c[0] + double(k2) * c[1])));
      const auto vh = v.coefficient({k1, k2});
      for (int r = 0; r < 2; ++r) {
        const std::complex<double> dv = 2 * kPi * i * (double(k1) * vh[r * 2] + double(k2) * vh[r * 2 + 1]);
        roundtrip = std::max(roundtrip, std::abs(dv - c[r]));
      }
    }
  }

  const int n = 2 * m + 2;
  const auto grid = synthesize(bs.series(), n);
  double mean = 0.0;
  for (int a = 0; a < 2; ++a) {
    double s = 0.0;
    for (double x : grid[a]) s += x;
    mean = std::max(mean, std::abs(s / (n * n)));
  }

  auto sup = [&](const Kernel& k) {
    const auto g = synthesize(k.series(), n);
    double s = 0.0;
    for (std::size_t j = 0; j < g[0].size(); ++j) s = std::max(s, std::hypot(g[0][j], g[1][j]));
    return s;
  };
  auto l2 = [&](const std::vector<std::vector<double>>& g, const std::vector<std::vector<double>>* ref) {
    double s = 0.0;
    for (int a = 0; a < 2; ++a) {
      for (std::size_t j = 0; j < g[a].size(); ++j) {
        const double d = g[a][j] - (ref ? (*ref)[a][j] : 0.0);
        s += d * d;
      }
    }
    return std::sqrt(s / (n * n));
  };
  const double sup0 = sup(bs);
  bool contracts = true;
  bool monotone = true;
  double prev_norm = INFINITY;
  double prev_err = INFINITY;
  for (double delta : {0.2, 0.1, 0.05, 0.02}) {
    const Kernel kd = mollify(bs, delta);
    if (sup(kd) > sup0 + 1e-12) contracts = false;
    const auto g = synthesize(kd.series(), n);
    const double err = l2(g, &grid);
    const double norm = l2(g, nullptr);
    // Smaller delta: closer to K in L2 and larger L2 norm.
    if (!(err < prev_err) || !(norm > prev_norm || prev_norm == INFINITY)) monotone = false;
    prev_err = err;
    prev_norm = norm;
  }
  const bool pass = antisym < 1e-12 && div < 1e-10 && mean < 1e-10 && roundtrip < 1e-10 && contracts && monotone;
  return {pass, "antisymmetry " + fmt(antisym) + ", divergence " + fmt(div) + ", mean " + fmt(mean) +
                    ", K=div V " + fmt(roundtrip) + ", sup contraction " + (contracts ? "ok" : "fail") +
                    ", L2 monotone " + (monotone ? "ok" : "fail")};
}

// ---------------------------------------------------------------- A8

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome a8_determinism() {
  const nlohmann::json doc = {{"schema_version", 1},
                              {"seed", 2026},
                              {"kernel", {{"family", "smooth_trig"}, {"amplitude", 1.0}}},
                              {"concentration", {{"N_list", {64, 128}}, {"replicas", 200}}}};
  cli::RunConfig config = cli::parse_config(doc);
  const fs::path base = fs::temp_directory_path() / ("chaoslab_accept_" + std::to_string(::getpid()));
  std::ostringstream log;
  std::string csv[2];
  int k = 0;
  for (int workers : {1, 8}) {
    config.output_dir = (base / ("w" + std::to_string(workers))).string();
    const int code = cli::run_command(cli::Command::concentration, config, workers, log);
    if (code != 0) return {false, "concentration exited " + std::to_string(code)};
    csv[k++] = slurp(fs::path(config.output_dir) / "concentration.csv");
  }
  fs::remove_all(base);
  const bool same = !csv[0].empty() && csv[0] == csv[1];
  const auto rows = std::count(csv[0].begin(), csv[0].end(), '\n') - 1;
  return {same, std::string("workers 1 vs 8: ") + (same ? "byte-identical" : "DIFFERENT") + " (" +
                    std::to_string(rows) + " rows)"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chaoslab acceptance suite"};
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::string> only;
  app.add_option("--workers", workers, "worker threads for Monte Carlo criteria")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "run a subset, e.g. --only A1 A7");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"A1", a1_rate_function},
      {"A2", a2_pde_solver},
      {"A3", a3_ot_oracles},
      {"A4", a4_donsker_varadhan},
      {"A5", [&] { return a5_entropy_decay(workers); }},
      {"A6", [&] { return a6_concentration_shape(workers); }},
      {"A7", a7_kernel_bank},
      {"A8", a8_determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failures;
    std::cout << name << " " << (out.pass ? "PASS" : "FAIL") << " [" << fmt(secs) << " s] "
              << out.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
