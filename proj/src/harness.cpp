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

#include "chaoslab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include "json.hpp"
#include <sstream>
#include <thread>

#include "chaoslab/entropy.hpp"
#include "chaoslab/error.hpp"
#include "chaoslab/particles.hpp"
#include "chaoslab/transport.hpp"

namespace chaoslab {
namespace {

constexpr double kZ95 = 1.959963984540054;

// Per-N state shared read-only by all replicas.
struct ReplicaContext {
  SimParams params;
  const GridDensity* reference = nullptr;
  SamplingMode mode = SamplingMode::particle;
};

ReplicaContext make_context(const ExperimentPlan& plan, const GridDensity& reference,
                            int n_particles) {
  ReplicaContext ctx;
  ctx.mode = plan.mode;
  ctx.reference = &reference;
  ctx.params.n_particles = n_particles;
  ctx.params.horizon = plan.horizon;
  ctx.params.dt = plan.dt;
  ctx.params.seed = plan.seed;
  ctx.params.kernel = kernel_for(plan, n_particles);
  ctx.params.drift = Drift(plan.drift);
  if (plan.mode == SamplingMode::particle) {
    ctx.params.rho0 = make_density(plan.rho0, plan.dim, plan.grid_n);
    ctx.params.validate();
  }
  return ctx;
}

ParticleConfig run_replica(const ReplicaContext& ctx, std::uint64_t replica) {
  const auto n = static_cast<std::size_t>(ctx.params.n_particles);
  if (ctx.mode == SamplingMode::particle) return simulate(ctx.params, replica);
  return sample_density(*ctx.reference, ReplicaStreams::for_replica(ctx.params.seed, n, replica),
                        rng::Purpose::iid_sample);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string_view mode_name(SamplingMode mode) {
  return mode == SamplingMode::particle ? "particle" : "iid_baseline";
}

SamplingMode parse_mode(std::string_view name) {
  if (name == "particle") return SamplingMode::particle;
  if (name == "iid_baseline") return SamplingMode::iid_baseline;
  throw InvalidArgument("unknown mode '" + std::string(name) + "'");
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr error;
  std::size_t error_index = std::numeric_limits<std::size_t>::max();
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        // Keep the lowest failing index so the reported error is scheduling-independent.
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

int ExperimentPlan::effective_bins() const {
  if (bins > 0) return bins;
  return dim == 1 ? 32 : 16;
}

void ExperimentPlan::validate() const {
  std::vector<std::string> errors;
  if (dim != 1 && dim != 2) errors.push_back("d must be 1 or 2");
  if (grid_n < 4 || grid_n % 2 != 0) errors.push_back("grid n must be even and >= 4");
  if (!(dt > 0.0) || !(horizon >= dt)) {
    errors.push_back("need 0 < dt <= T");
  } else if (std::abs(horizon / dt - std::round(horizon / dt)) > 1e-9 * std::round(horizon / dt)) {
    errors.push_back("T / dt must be an integer step count");
  }
  if (!(pde_dt > 0.0) || !(horizon >= pde_dt)) errors.push_back("need 0 < pde dt <= T");
  if (n_list.empty()) errors.push_back("N list must be nonempty");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 2) errors.push_back("N values must be >= 2");
    if (i > 0 && n_list[i] <= n_list[i - 1]) errors.push_back("N list must be strictly increasing");
  }
  if (epsilon_list.empty()) errors.push_back("epsilon list must be nonempty");
  for (double e : epsilon_list) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      errors.push_back("epsilon values must be > 0 (got " + format_real(e) + ")");
    }
  }
  if (!(p >= 1.0) || !std::isfinite(p)) errors.push_back("p must be >= 1");
  if (replicas < 200) errors.push_back("replicas M must be >= 200");
  if (kernel.dim != dim || drift.dim != dim) errors.push_back("kernel/drift dimension != d");
  try {
    Kernel k(kernel);
    Drift f(drift);
  } catch (const InvalidArgument& e) {
    errors.push_back(e.what());
  }
  if (!errors.empty()) {
    std::string msg = "invalid experiment plan:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw InvalidArgument(msg);
  }
}

Interval wilson_interval(int successes, int trials) {
  if (trials <= 0 || successes < 0 || successes > trials) {
    throw InvalidArgument("wilson_interval: need 0 <= k <= M, M > 0");
  }
  const double m = trials;
  const double z2 = kZ95 * kZ95;
  if (successes == 0) return {0.0, z2 / (m + z2)};
  const double ph = successes / m;
  const double denom = 1.0 + z2 / m;
  const double center = (ph + z2 / (2.0 * m)) / denom;
  const double half = kZ95 * std::sqrt(ph * (1.0 - ph) / m + z2 / (4.0 * m * m)) / denom;
  if (successes == trials) return {std::min(center - half, ph), 1.0};
  return {std::min(center - half, ph), std::max(center + half, ph)};
}

Kernel kernel_for(const ExperimentPlan& plan, int n_particles) {
  Kernel k(plan.kernel);
  if (!plan.delta_coupling) return k;
  const double delta = std::pow(static_cast<double>(n_particles), -1.0 / (2.0 * plan.dim));
  return mollify(k, delta);
}

GridDensity reference_density(const ExperimentPlan& plan, SolverStats* stats) {
  const bool passive = plan.kernel.family == KernelFamily::zero &&
                       plan.drift.family == DriftFamily::zero;
  if (passive && plan.rho0.kind != "file") {
    return heat_flow(plan.rho0, plan.dim, plan.grid_n, plan.horizon);
  }
  const GridDensity rho0 = make_density(plan.rho0, plan.dim, plan.grid_n);
  PdeTrajectory traj = solve_pde(rho0, Kernel(plan.kernel), Drift(plan.drift), plan.horizon,
                                 plan.pde_dt);
  if (stats) *stats = traj.stats;
  return traj.checkpoints.back();
}

std::vector<double> replica_sample(const ExperimentPlan& plan, const GridDensity& reference,
                                   int n_particles, std::uint64_t replica) {
  const ReplicaContext ctx = make_context(plan, reference, n_particles);
  return run_replica(ctx, replica).interleaved();
}

double distance_to_reference(const std::vector<double>& sample, int dim,
                             const GridDensity& reference, double p) {
  const EmpiricalMeasure mu(dim, sample);
  if (dim == 1) return wasserstein_1d(mu, reference, p);
  return wasserstein_sinkhorn(mu, reference, p, calibrated_reg(mu, p));
}

std::vector<double> replica_distances(const ExperimentPlan& plan, const GridDensity& reference,
                                      int n_particles, int workers) {
  const ReplicaContext ctx = make_context(plan, reference, n_particles);
  std::vector<double> out(static_cast<std::size_t>(plan.replicas));
  parallel_for(out.size(), workers, [&](std::size_t r) {
    const ParticleConfig x = run_replica(ctx, r);
    out[r] = distance_to_reference(x.interleaved(), plan.dim, reference, plan.p);
  });
  return out;
}

ConcentrationRecord make_record(const ExperimentPlan& plan, int n_particles, double epsilon,
                                const std::vector<double>& distances) {
  ConcentrationRecord rec;
  rec.mode = std::string(mode_name(plan.mode));
  rec.p = plan.p;
  rec.d = plan.dim;
  rec.n = n_particles;
  rec.epsilon = epsilon;
  rec.replicas = static_cast<int>(distances.size());
  rec.exceed_count = static_cast<int>(
      std::count_if(distances.begin(), distances.end(), [&](double d) { return d > epsilon; }));
  rec.p_hat = static_cast<double>(rec.exceed_count) / rec.replicas;
  const Interval ci = wilson_interval(rec.exceed_count, rec.replicas);
  rec.wilson_lo = ci.lo;
  rec.wilson_hi = ci.hi;
  rec.a_p = rate_a_p(plan.p, plan.dim, epsilon);
  rec.seed = plan.seed;
  return rec;
}

ConcentrationRecord run_cell(const ExperimentPlan& plan, const GridDensity& reference,
                             int n_particles, double epsilon, int workers) {
  return make_record(plan, n_particles, epsilon,
                     replica_distances(plan, reference, n_particles, workers));
}

ConcentrationRun run_concentration(const ExperimentPlan& plan, int workers) {
  plan.validate();
  ConcentrationRun run;
  run.reference = reference_density(plan);
  for (int n : plan.n_list) {
    try {
      run.distances.push_back(replica_distances(plan, run.reference, n, workers));
    } catch (const NumericalFailure& e) {
      throw NumericalFailure(std::string(e.what()) + " [cell N=" + std::to_string(n) + "]");
    }
    for (double eps : plan.epsilon_list) {
      run.records.push_back(make_record(plan, n, eps, run.distances.back()));
    }
  }
  return run;
}

RateFit fit_exponential_rate(const std::vector<ConcentrationRecord>& records) {
  if (records.empty()) throw InvalidArgument("fit_exponential_rate: no records");
  RateFit fit;
  fit.mode = records.front().mode;
  fit.p = records.front().p;
  fit.epsilon = records.front().epsilon;
  fit.a_p = records.front().a_p;
  std::vector<double> xs;
  std::vector<double> ys;
  std::string degenerate;
  for (const auto& r : records) {
    if (r.p_hat > 0.0 && r.p_hat < 1.0) {
      xs.push_back(r.n);
      ys.push_back(-std::log(r.p_hat));
    } else {
      if (!degenerate.empty()) degenerate += ", ";
      degenerate += "N=" + std::to_string(r.n) + " (p_hat=" + format_real(r.p_hat) + ")";
    }
  }
  if (xs.size() < 3) {
    throw InvalidArgument("fit_exponential_rate: fewer than 3 cells with 0 < p_hat < 1 at epsilon=" +
                          format_real(fit.epsilon) + "; degenerate: " + degenerate);
  }
  const double nx = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= nx;
  my /= nx;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (my + fit.slope * (xs[i] - mx));
    ss_res += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.ok = true;
  if (!degenerate.empty()) fit.note = "excluded: " + degenerate;
  return fit;
}

std::vector<RateFit> fit_all_rates(const std::vector<ConcentrationRecord>& records) {
  std::vector<std::pair<std::string, double>> keys;
  for (const auto& r : records) {
    const std::pair<std::string, double> key{r.mode, r.epsilon};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  std::vector<RateFit> fits;
  for (const auto& [mode, eps] : keys) {
    std::vector<ConcentrationRecord> group;
    for (const auto& r : records) {
      if (r.mode == mode && r.epsilon == eps) group.push_back(r);
    }
    try {
      fits.push_back(fit_exponential_rate(group));
    } catch (const InvalidArgument& e) {
      RateFit f;
      f.mode = mode;
      f.p = group.front().p;
      f.epsilon = eps;
      f.a_p = group.front().a_p;
      f.slope = std::numeric_limits<double>::quiet_NaN();
      f.r2 = std::numeric_limits<double>::quiet_NaN();
      f.note = e.what();
      fits.push_back(f);
    }
  }
  return fits;
}

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  PowerLawFit fit;
  if (x.size() != y.size() || x.size() < 2) {
    fit.note = "need at least 2 points";
    return fit;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(y[i])) {
      fit.note = "non-positive value at point " + std::to_string(i) + " (x=" + format_real(x[i]) +
                 ", y=" + format_real(y[i]) + "); log-log fit undefined";
      fit.slope = std::numeric_limits<double>::quiet_NaN();
      fit.r2 = std::numeric_limits<double>::quiet_NaN();
      return fit;
    }
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    const double dy = std::log(y[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = std::log(y[i]) - (fit.intercept + fit.slope * std::log(x[i]));
    ss_res += e * e;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.ok = true;
  return fit;
}

EntropySweep entropy_decay_sweep(const ExperimentPlan& plan, int workers,
                                 const GridDensity* reference) {
  plan.validate();
  const int bins = plan.effective_bins();
  const std::size_t cells = plan.dim == 1 ? static_cast<std::size_t>(bins)
                                          : static_cast<std::size_t>(bins * bins);
  if (static_cast<std::size_t>(plan.replicas) < 100 * cells) {
    throw InvalidArgument("entropy sweep: replicas must be >= 100 * bins^d = " +
                          std::to_string(100 * cells));
  }
  GridDensity owned;
  if (reference == nullptr) {
    owned = reference_density(plan);
    reference = &owned;
  }
  EntropySweep sweep;
  std::vector<double> xs;
  std::vector<double> ys;
  for (int n : plan.n_list) {
    const ReplicaContext ctx = make_context(plan, *reference, n);
    const auto m = static_cast<std::size_t>(plan.replicas);
    const auto d = static_cast<std::size_t>(plan.dim);
    std::vector<double> samples(m * d);
    parallel_for(m, workers, [&](std::size_t r) {
      const ParticleConfig x = run_replica(ctx, r);
      for (std::size_t a = 0; a < d; ++a) samples[r * d + a] = x.coords[a][0];
    });
    const double kl = binned_kl_estimate(samples, *reference, bins);
    sweep.points.push_back({n, kl});
    xs.push_back(n);
    ys.push_back(kl);
  }
  sweep.fit = fit_power_law(xs, ys);
  return sweep;
}

const char* const kRecordHeader =
    "mode,p,d,N,epsilon,M,exceed_count,p_hat,wilson_lo,wilson_hi,a_p,seed";

void emit_results(const std::vector<ConcentrationRecord>& records, std::ostream& out) {
  out << kRecordHeader << "\n";
  for (const auto& r : records) {
    out << r.mode << ',' << format_real(r.p) << ',' << r.d << ',' << r.n << ','
        << format_real(r.epsilon) << ',' << r.replicas << ',' << r.exceed_count << ','
        << format_real(r.p_hat) << ',' << format_real(r.wilson_lo) << ','
        << format_real(r.wilson_hi) << ',' << format_real(r.a_p) << ',' << r.seed << "\n";
  }
}

void emit_results(const std::vector<ConcentrationRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  emit_results(records, out);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<ConcentrationRecord> parse_results(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRecordHeader) {
    throw InvalidArgument("results csv: header mismatch");
  }
  std::vector<ConcentrationRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 12) throw InvalidArgument("results csv: expected 12 fields in '" + line + "'");
    ConcentrationRecord r;
    r.mode = f[0];
    r.p = std::stod(f[1]);
    r.d = std::stoi(f[2]);
    r.n = std::stoi(f[3]);
    r.epsilon = std::stod(f[4]);
    r.replicas = std::stoi(f[5]);
    r.exceed_count = std::stoi(f[6]);
    r.p_hat = std::stod(f[7]);
    r.wilson_lo = std::stod(f[8]);
    r.wilson_hi = std::stod(f[9]);
    r.a_p = std::stod(f[10]);
    r.seed = std::stoull(f[11]);
    out.push_back(r);
  }
  return out;
}

std::string rate_fits_json(const std::vector<RateFit>& fits) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& f : fits) {
    nlohmann::ordered_json o;
    o["mode"] = f.mode;
    o["p"] = f.p;
    o["epsilon"] = f.epsilon;
    o["slope"] = f.ok ? nlohmann::ordered_json(f.slope) : nlohmann::ordered_json(nullptr);
    o["r2"] = f.ok ? nlohmann::ordered_json(f.r2) : nlohmann::ordered_json(nullptr);
    o["a_p"] = f.a_p;
    if (!f.note.empty()) o["note"] = f.note;
    arr.push_back(o);
  }
  return arr.dump(2) + "\n";
}

}  // namespace chaoslab
