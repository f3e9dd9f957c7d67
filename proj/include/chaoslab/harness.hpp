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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "chaoslab/grid.hpp"
#include "chaoslab/kernels.hpp"
#include "chaoslab/meanfield.hpp"

namespace chaoslab {

enum class SamplingMode { particle, iid_baseline };

std::string_view mode_name(SamplingMode mode);
SamplingMode parse_mode(std::string_view name);

/// Runs fn(i) for i in [0, count) on `workers` threads. Work items must write
/// only to their own output slots; results then do not depend on scheduling.
/// The first exception thrown by any item is rethrown after all threads join.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

struct ExperimentPlan {
  int dim = 1;
  int grid_n = 256;
  double horizon = 0.5;
  double dt = 0.5 / 400;
  double pde_dt = 0.5 / 400;
  KernelSpec kernel;
  DriftSpec drift;
  DensitySpec rho0;
  std::vector<int> n_list;
  std::vector<double> epsilon_list;
  double p = 1.0;
  int replicas = 2000;
  SamplingMode mode = SamplingMode::particle;
  std::uint64_t seed = 0;
  /// Replace K by K_delta with delta = N^{-1/(2d)} for each N.
  bool delta_coupling = false;
  int bins = 0;  // entropy sweep bins per axis; 0 selects 32 (d = 1) or 16 (d = 2)

  /// Collects every violated condition; throws InvalidArgument listing them.
  void validate() const;
  int effective_bins() const;
};

struct ConcentrationRecord {
  std::string mode;
  double p = 1.0;
  int d = 1;
  int n = 0;
  double epsilon = 0.0;
  int replicas = 0;
  int exceed_count = 0;
  double p_hat = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  double a_p = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const ConcentrationRecord&) const = default;
};

/// 95% Wilson score interval (z = 1.959963984540054). For k = 0 the lower end
/// is 0 and the upper end z^2 / (M + z^2).
struct Interval {
  double lo;
  double hi;
};
Interval wilson_interval(int successes, int trials);

/// rho_bar_T for the plan: exact heat flow when K = 0, F = 0 and rho0 is
/// analytic, otherwise the mean-field solver from rho0.
GridDensity reference_density(const ExperimentPlan& plan, SolverStats* stats = nullptr);

/// Kernel used at particle count N (mollified when delta_coupling is on).
Kernel kernel_for(const ExperimentPlan& plan, int n_particles);

/// One replica's empirical measure at time T: the particle system (particle
/// mode) or N i.i.d. draws from rho_bar_T (iid mode).
std::vector<double> replica_sample(const ExperimentPlan& plan, const GridDensity& reference,
                                   int n_particles, std::uint64_t replica);

/// d_p between an interleaved sample and the reference: exact circular OT in
/// d = 1, debiased Sinkhorn at the calibrated reg in d = 2.
double distance_to_reference(const std::vector<double>& sample, int dim,
                             const GridDensity& reference, double p);

/// Distances of all replicas for one N; slot r holds replica r.
std::vector<double> replica_distances(const ExperimentPlan& plan, const GridDensity& reference,
                                      int n_particles, int workers);

/// Thresholds stored distances against epsilon (exceedance is d > epsilon).
ConcentrationRecord make_record(const ExperimentPlan& plan, int n_particles, double epsilon,
                                const std::vector<double>& distances);

ConcentrationRecord run_cell(const ExperimentPlan& plan, const GridDensity& reference,
                             int n_particles, double epsilon, int workers);

struct ConcentrationRun {
  GridDensity reference;
  std::vector<std::vector<double>> distances;  // [N index][replica]
  std::vector<ConcentrationRecord> records;    // N-major, epsilon-minor
};

ConcentrationRun run_concentration(const ExperimentPlan& plan, int workers);

struct RateFit {
  std::string mode;
  double p = 1.0;
  double epsilon = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
  double a_p = 0.0;
  bool ok = false;
  std::string note;  // degenerate cells or the reason no fit exists
};

/// Least squares of -log p_hat against N over records with 0 < p_hat < 1.
/// Throws InvalidArgument naming the degenerate cells when fewer than 3 remain.
RateFit fit_exponential_rate(const std::vector<ConcentrationRecord>& records);

/// One fit per (mode, epsilon); failures are recorded in RateFit::note.
std::vector<RateFit> fit_all_rates(const std::vector<ConcentrationRecord>& records);

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  bool ok = false;
  std::string note;
};

/// Least squares of log y against log x; requires every y > 0.
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

struct EntropyPoint {
  int n = 0;
  double kl = 0.0;
};

struct EntropySweep {
  std::vector<EntropyPoint> points;
  PowerLawFit fit;
};

/// Marginal KL of X_T^1 (one particle per replica) against rho_bar_T per N.
EntropySweep entropy_decay_sweep(const ExperimentPlan& plan, int workers,
                                 const GridDensity* reference = nullptr);

/// CSV header: mode,p,d,N,epsilon,M,exceed_count,p_hat,wilson_lo,wilson_hi,a_p,seed
extern const char* const kRecordHeader;

void emit_results(const std::vector<ConcentrationRecord>& records, std::ostream& out);
void emit_results(const std::vector<ConcentrationRecord>& records, const std::string& path);
std::vector<ConcentrationRecord> parse_results(std::istream& in);

/// JSON array of {mode, p, epsilon, slope, r2, a_p}; null slope/r2 for failed fits.
std::string rate_fits_json(const std::vector<RateFit>& fits);

/// Real number with 17 significant digits.
std::string format_real(double v);

}  // namespace chaoslab
