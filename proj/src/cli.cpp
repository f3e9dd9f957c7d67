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

#include "chaoslab/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "chaoslab/entropy.hpp"
#include "chaoslab/meanfield.hpp"
#include "chaoslab/particles.hpp"

namespace chaoslab::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr double kDvGapTolerance = 1e-6;

fs::path prepare_dir(const RunConfig& config) {
  fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "'");
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

void write_manifest(const fs::path& dir, const RunConfig& config) {
  write_text(dir / "manifest.json", config.to_json().dump(2) + "\n");
}

ordered_json real_or_null(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

int cmd_simulate(const RunConfig& config, int workers, std::ostream& log) {
  SimParams params;
  params.n_particles = config.simulate.n_particles;
  params.horizon = config.horizon;
  params.dt = config.dt;
  params.seed = config.seed;
  params.kernel = Kernel(config.kernel);
  params.drift = Drift(config.drift);
  params.rho0 = make_density(config.rho0, config.dim, config.grid_n);
  params.noise = config.simulate.noise;
  params.validate();

  std::vector<ParticleConfig> runs(static_cast<std::size_t>(config.simulate.replicas));
  parallel_for(runs.size(), workers, [&](std::size_t r) { runs[r] = simulate(params, r); });

  const fs::path dir = prepare_dir(config);
  std::ofstream out = open_out(dir / "positions.csv");
  out << "replica,particle_index,x1" << (config.dim == 2 ? ",x2" : "") << "\n";
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (std::size_t i = 0; i < runs[r].size(); ++i) {
      out << r << ',' << i;
      for (int a = 0; a < config.dim; ++a) {
        out << ',' << format_real(runs[r].coords[static_cast<std::size_t>(a)][i]);
      }
      out << "\n";
    }
  }
  if (!out) throw std::runtime_error("write to positions.csv failed");
  write_manifest(dir, config);
  log << "simulate: " << runs.size() << " replica(s) of N=" << params.n_particles << " to T="
      << format_real(config.horizon) << " -> " << (dir / "positions.csv").string() << "\n";
  return kExitOk;
}

int cmd_solve_pde(const RunConfig& config, std::ostream& log) {
  const GridDensity rho0 = make_density(config.rho0, config.dim, config.grid_n);
  const PdeTrajectory traj = solve_pde(rho0, Kernel(config.kernel), Drift(config.drift),
                                       config.horizon, config.solve_pde.dt,
                                       config.solve_pde.checkpoints);
  const fs::path dir = prepare_dir(config);
  ordered_json summary;
  ordered_json files = ordered_json::array();
  for (std::size_t c = 0; c < traj.checkpoints.size(); ++c) {
    char name[32];
    std::snprintf(name, sizeof name, "rho_%03zu.csv", c);
    write_grid_csv((dir / name).string(), traj.checkpoints[c]);
    files.push_back({{"time", traj.checkpoints[c].time}, {"file", name}});
  }
  const SolverStats& s = traj.stats;
  summary["checkpoints"] = files;
  summary["stats"] = {{"steps", s.steps},
                      {"clamp_events", s.clamp_events},
                      {"renormalizations", s.renormalizations},
                      {"cfl_warnings", s.cfl_warnings},
                      {"min_value", s.min_value},
                      {"max_value", s.max_value},
                      {"max_mass_error", s.max_mass_error}};
  write_text(dir / "solve_pde.json", summary.dump(2) + "\n");
  write_manifest(dir, config);
  log << "solve-pde: " << s.steps << " steps, " << traj.checkpoints.size()
      << " checkpoint(s), min rho " << format_real(s.min_value) << ", max mass error "
      << format_real(s.max_mass_error) << "\n";
  if (s.cfl_warnings > 0) {
    log << "warning: CFL condition exceeded on " << s.cfl_warnings << " step(s)\n";
  }
  return kExitOk;
}

int cmd_concentration(const RunConfig& config, int workers, std::ostream& log) {
  const ExperimentPlan plan = config.concentration_plan();
  const ConcentrationRun run = run_concentration(plan, workers);
  const fs::path dir = prepare_dir(config);
  emit_results(run.records, (dir / "concentration.csv").string());
  const std::vector<RateFit> fits = fit_all_rates(run.records);
  write_text(dir / "rate_fits.json", rate_fits_json(fits));
  write_grid_csv((dir / "rho_bar_T.csv").string(), run.reference);
  write_manifest(dir, config);
  log << "concentration: " << run.records.size() << " cells -> "
      << (dir / "concentration.csv").string() << "\n";
  for (const auto& f : fits) {
    log << "  mode=" << f.mode << " epsilon=" << format_real(f.epsilon);
    if (f.ok) {
      log << " slope=" << format_real(f.slope) << " r2=" << format_real(f.r2) << "\n";
    } else {
      log << " no fit: " << f.note << "\n";
    }
  }
  return kExitOk;
}

int cmd_entropy_sweep(const RunConfig& config, int workers, std::ostream& log) {
  const ExperimentPlan plan = config.entropy_plan();
  const EntropySweep sweep = entropy_decay_sweep(plan, workers);
  const fs::path dir = prepare_dir(config);
  std::ofstream out = open_out(dir / "entropy_sweep.csv");
  out << "N,M,bins,kl\n";
  for (const auto& p : sweep.points) {
    out << p.n << ',' << plan.replicas << ',' << plan.effective_bins() << ',' << format_real(p.kl)
        << "\n";
  }
  if (!out) throw std::runtime_error("write to entropy_sweep.csv failed");
  ordered_json fit;
  fit["slope"] = sweep.fit.ok ? real_or_null(sweep.fit.slope) : ordered_json(nullptr);
  fit["intercept"] = sweep.fit.ok ? real_or_null(sweep.fit.intercept) : ordered_json(nullptr);
  fit["r2"] = sweep.fit.ok ? real_or_null(sweep.fit.r2) : ordered_json(nullptr);
  if (!sweep.fit.note.empty()) fit["note"] = sweep.fit.note;
  write_text(dir / "entropy_fit.json", fit.dump(2) + "\n");
  write_manifest(dir, config);
  log << "entropy-sweep:";
  for (const auto& p : sweep.points) log << " N=" << p.n << ":" << format_real(p.kl);
  log << "\n  log-log slope "
      << (sweep.fit.ok ? format_real(sweep.fit.slope) : "undefined (" + sweep.fit.note + ")")
      << "\n";
  return kExitOk;
}

int cmd_dv_check(const RunConfig& config, std::ostream& log) {
  const DvCheckSection& dv = *config.dv_check;
  std::vector<std::size_t> subset;
  for (int i : dv.subset) subset.push_back(static_cast<std::size_t>(i - 1));
  const fs::path dir = prepare_dir(config);
  ordered_json report;
  int code = kExitOk;
  try {
    const DvReport r = dv_check(dv.mu, subset, dv.grid_steps);
    report["lhs"] = r.lhs;
    report["rhs"] = r.rhs;
    report["gap"] = r.gap;
    report["scan_min"] = r.scan_min;
    report["refined"] = r.refined;
    report["minimizer"] = r.minimizer;
    const bool pass = r.gap <= kDvGapTolerance;
    report["verdict"] = pass ? "pass" : "fail";
    log << "lhs=" << format_real(r.lhs) << " rhs=" << format_real(r.rhs)
        << " gap=" << format_real(r.gap) << " verdict=" << (pass ? "pass" : "fail") << "\n";
    code = pass ? kExitOk : kExitVerification;
  } catch (const InfiniteLhs&) {
    report["lhs"] = "inf";
    report["rhs"] = "inf";
    report["gap"] = nullptr;
    report["verdict"] = "infinite";
    log << "lhs=inf rhs=inf verdict=infinite (mu(A) = 0)\n";
    code = kExitInfinite;
  }
  write_text(dir / "dv_report.json", report.dump(2) + "\n");
  write_manifest(dir, config);
  return code;
}

int cmd_kernel_info(const RunConfig& config, std::ostream& log) {
  const Kernel kernel(config.kernel);
  const TrigSeries& series = kernel.series();
  const int d = config.dim;
  const int res = config.kernel_info.resolution;
  const std::size_t nodes = d == 1 ? static_cast<std::size_t>(res)
                                   : static_cast<std::size_t>(res) * static_cast<std::size_t>(res);
  double sup = 0.0;
  double antisym = 0.0;
  Vec sum = Vec::zeros(d);
  for (std::size_t idx = 0; idx < nodes; ++idx) {
    Vec x = Vec::zeros(d);
    if (d == 1) {
      x[0] = static_cast<double>(idx) / res;
    } else {
      x[0] = static_cast<double>(idx / static_cast<std::size_t>(res)) / res;
      x[1] = static_cast<double>(idx % static_cast<std::size_t>(res)) / res;
    }
    const Vec k = series.eval(x);
    const Vec km = series.eval(-x);
    sup = std::max(sup, k.norm());
    antisym = std::max(antisym, (k + km).norm());
    sum = sum + k;
  }
  double divergence = 0.0;
  for (const auto& m : series.modes()) {
    double s = 0.0;
    double c = 0.0;
    for (int a = 0; a < d; ++a) {
      s += m.k[static_cast<std::size_t>(a)] * m.sin_coef[a];
      c += m.k[static_cast<std::size_t>(a)] * m.cos_coef[a];
    }
    divergence = std::max({divergence, std::abs(s), std::abs(c)});
  }
  ordered_json info;
  info["family"] = std::string(family_name(config.kernel.family));
  info["d"] = d;
  info["modes"] = series.modes().size();
  info["max_wavenumber"] = series.max_wavenumber();
  info["odd"] = series.is_odd();
  info["resolution"] = res;
  info["sup_norm"] = sup;
  info["antisymmetry_error"] = antisym;
  std::vector<double> mean;
  for (int a = 0; a < d; ++a) mean.push_back(sum[a] / static_cast<double>(nodes));
  info["grid_mean"] = mean;
  info["max_mode_divergence"] = divergence;
  const Vec mu = series.mean();
  if (mu.norm() == 0.0) {
    info["wminus_norm_surrogate"] = wminus_norm_surrogate(primitive_matrix(kernel), res);
  } else {
    info["wminus_norm_surrogate"] = nullptr;
  }
  const fs::path dir = prepare_dir(config);
  write_text(dir / "kernel_info.json", info.dump(2) + "\n");
  write_manifest(dir, config);
  log << info.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run_command(Command command, const RunConfig& config, int workers, std::ostream& log) {
  validate_for(config, command);
  switch (command) {
    case Command::simulate:
      return cmd_simulate(config, workers, log);
    case Command::solve_pde:
      return cmd_solve_pde(config, log);
    case Command::concentration:
      return cmd_concentration(config, workers, log);
    case Command::entropy_sweep:
      return cmd_entropy_sweep(config, workers, log);
    case Command::dv_check:
      return cmd_dv_check(config, log);
    case Command::kernel_info:
      return cmd_kernel_info(config, log);
  }
  return kExitOther;
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"chaoslab: interacting particle systems on the flat torus"};
  app.require_subcommand(1);
  Options options;
  const unsigned hw = std::thread::hardware_concurrency();
  options.workers = hw == 0 ? 1 : static_cast<int>(hw);
  std::string output_dir;
  std::uint64_t seed = 0;
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (auto c : {Command::simulate, Command::solve_pde, Command::concentration,
                 Command::entropy_sweep, Command::dv_check, Command::kernel_info}) {
    CLI::App* sub = app.add_subcommand(std::string(command_name(c)));
    sub->add_option("--config", options.config_path, "JSON run config")->required();
    sub->add_option("--workers", options.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--output-dir", output_dir, "output directory (overrides config)");
    sub->add_option("--seed", seed, "seed (overrides CHAOSLAB_SEED and config)");
    subs.emplace_back(sub, c);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  for (const auto& [sub, c] : subs) {
    if (!sub->parsed()) continue;
    options.command = c;
    if (sub->count("--output-dir") > 0) options.output_dir = output_dir;
    if (sub->count("--seed") > 0) options.seed = seed;
  }
  try {
    RunConfig config = load_config(options.config_path);
    apply_overrides(config, options, std::getenv("CHAOSLAB_SEED"));
    return run_command(options.command, config, options.workers, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitOther;
  }
}

}  // namespace chaoslab::cli
