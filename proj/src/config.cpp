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

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "chaoslab/cli.hpp"

namespace chaoslab::cli {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Reads one JSON object, recording type errors and unknown keys under its path.
class Section {
 public:
  Section(const json* obj, std::string path, std::vector<std::string>& problems,
          std::set<std::string> allowed)
      : obj_(obj), path_(std::move(path)), problems_(problems), allowed_(std::move(allowed)) {
    if (obj_ != nullptr && !obj_->is_object()) {
      fail("", "must be an object");
      obj_ = nullptr;
    }
    if (obj_ == nullptr) return;
    for (const auto& item : obj_->items()) {
      if (!allowed_.count(item.key())) fail(item.key(), "unknown field");
    }
  }

  bool has(const std::string& key) const { return obj_ != nullptr && obj_->contains(key); }

  const json* child(const std::string& key) const {
    return has(key) ? &obj_->at(key) : nullptr;
  }

  std::string path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void fail(const std::string& key, const std::string& msg) {
    problems_.push_back((key.empty() ? path_ : path(key)) + ": " + msg);
  }

  void get(const std::string& key, int& out) {
    if (!has(key)) return;
    const json& v = obj_->at(key);
    if (!v.is_number_integer()) return fail(key, "expected an integer");
    const auto i = v.get<std::int64_t>();
    if (i < INT32_MIN || i > INT32_MAX) return fail(key, "integer out of range");
    out = static_cast<int>(i);
  }

  void get(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    const json& v = obj_->at(key);
    if (v.is_number_unsigned()) {
      out = v.get<std::uint64_t>();
    } else if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      out = static_cast<std::uint64_t>(v.get<std::int64_t>());
    } else {
      fail(key, "expected a non-negative integer");
    }
  }

  void get(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = obj_->at(key);
    if (!v.is_number()) return fail(key, "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) fail(key, "must be finite");
  }

  void get(const std::string& key, bool& out) {
    if (!has(key)) return;
    const json& v = obj_->at(key);
    if (!v.is_boolean()) return fail(key, "expected true or false");
    out = v.get<bool>();
  }

  void get(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = obj_->at(key);
    if (!v.is_string()) return fail(key, "expected a string");
    out = v.get<std::string>();
  }

  void get(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const json& v = obj_->at(key);
    if (!v.is_array()) return fail(key, "expected an array of numbers");
    std::vector<double> r;
    for (const auto& e : v) {
      if (!e.is_number()) return fail(key, "expected an array of numbers");
      r.push_back(e.get<double>());
    }
    out = std::move(r);
  }

  void get(const std::string& key, std::vector<int>& out) {
    if (!has(key)) return;
    const json& v = obj_->at(key);
    if (!v.is_array()) return fail(key, "expected an array of integers");
    std::vector<int> r;
    for (const auto& e : v) {
      if (!e.is_number_integer()) return fail(key, "expected an array of integers");
      const auto i = e.get<std::int64_t>();
      if (i < INT32_MIN || i > INT32_MAX) return fail(key, "integer out of range");
      r.push_back(static_cast<int>(i));
    }
    out = std::move(r);
  }

 private:
  const json* obj_;
  std::string path_;
  std::vector<std::string>& problems_;
  std::set<std::string> allowed_;
};

bool integral_ratio(double t, double dt) {
  const double steps = std::round(t / dt);
  return steps >= 1.0 && std::abs(t / dt - steps) <= 1e-9 * steps;
}

template <class T>
ordered_json array_of(const std::vector<T>& v) {
  ordered_json a = ordered_json::array();
  for (const T& x : v) a.push_back(x);
  return a;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : InvalidArgument([&] {
        std::string msg = "invalid config:";
        for (const auto& p : problems) msg += "\n  - " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

std::string_view command_name(Command c) {
  switch (c) {
    case Command::simulate:
      return "simulate";
    case Command::solve_pde:
      return "solve-pde";
    case Command::concentration:
      return "concentration";
    case Command::entropy_sweep:
      return "entropy-sweep";
    case Command::dv_check:
      return "dv-check";
    case Command::kernel_info:
      return "kernel-info";
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view name) {
  for (auto c : {Command::simulate, Command::solve_pde, Command::concentration,
                 Command::entropy_sweep, Command::dv_check, Command::kernel_info}) {
    if (command_name(c) == name) return c;
  }
  return std::nullopt;
}

RunConfig parse_config(const json& doc) {
  std::vector<std::string> problems;
  RunConfig cfg;
  if (!doc.is_object()) throw ConfigError({"config: top level must be a JSON object"});

  Section top(&doc, "", problems,
              {"schema_version", "seed", "output_dir", "d", "grid_n", "T", "dt", "kernel", "drift",
               "rho0", "simulate", "solve_pde", "concentration", "entropy_sweep", "dv_check",
               "kernel_info"});
  if (!top.has("schema_version")) {
    top.fail("schema_version", "required (must be 1)");
  } else {
    top.get("schema_version", cfg.schema_version);
    if (cfg.schema_version != 1) top.fail("schema_version", "unsupported version");
  }
  top.get("seed", cfg.seed);
  top.get("output_dir", cfg.output_dir);
  top.get("d", cfg.dim);
  if (cfg.dim != 1 && cfg.dim != 2) top.fail("d", "must be 1 or 2");
  const int dim = cfg.dim == 2 ? 2 : 1;
  cfg.grid_n = dim == 1 ? 256 : 128;
  top.get("grid_n", cfg.grid_n);
  if (cfg.grid_n < 4 || cfg.grid_n % 2 != 0) top.fail("grid_n", "must be even and >= 4");
  top.get("T", cfg.horizon);
  if (!(cfg.horizon > 0.0)) top.fail("T", "must be > 0");
  cfg.dt = cfg.horizon / 400.0;
  top.get("dt", cfg.dt);
  if (!(cfg.dt > 0.0) || cfg.dt > cfg.horizon) {
    top.fail("dt", "need 0 < dt <= T");
  } else if (!integral_ratio(cfg.horizon, cfg.dt)) {
    top.fail("dt", "T / dt must be an integer");
  }

  {
    Section s(top.child("kernel"), "kernel", problems,
              {"family", "amplitude", "amplitudes", "m_trunc", "wavenumber", "delta"});
    cfg.kernel.dim = dim;
    std::string family = std::string(family_name(cfg.kernel.family));
    s.get("family", family);
    try {
      cfg.kernel.family = parse_kernel_family(family);
    } catch (const InvalidArgument& e) {
      s.fail("family", e.what());
    }
    s.get("amplitude", cfg.kernel.amplitude);
    s.get("amplitudes", cfg.kernel.amplitudes);
    s.get("m_trunc", cfg.kernel.m_trunc);
    s.get("wavenumber", cfg.kernel.wavenumber);
    s.get("delta", cfg.kernel.delta);
  }
  {
    Section s(top.child("drift"), "drift", problems, {"family", "value", "amplitude", "wavenumber"});
    cfg.drift.dim = dim;
    cfg.drift.value = Vec::zeros(dim);
    std::string family = std::string(family_name(cfg.drift.family));
    s.get("family", family);
    try {
      cfg.drift.family = parse_drift_family(family);
    } catch (const InvalidArgument& e) {
      s.fail("family", e.what());
    }
    std::vector<double> value(static_cast<std::size_t>(dim), 0.0);
    s.get("value", value);
    if (value.size() != static_cast<std::size_t>(dim)) {
      s.fail("value", "must have d components");
    } else {
      for (int a = 0; a < dim; ++a) cfg.drift.value[a] = value[static_cast<std::size_t>(a)];
    }
    s.get("amplitude", cfg.drift.amplitude);
    s.get("wavenumber", cfg.drift.wavenumber);
  }
  {
    Section s(top.child("rho0"), "rho0", problems, {"kind", "amplitude", "wavenumber", "path"});
    s.get("kind", cfg.rho0.kind);
    s.get("amplitude", cfg.rho0.amplitude);
    s.get("wavenumber", cfg.rho0.wavenumber);
    s.get("path", cfg.rho0.path);
    if (cfg.rho0.kind != "uniform" && cfg.rho0.kind != "cosine" && cfg.rho0.kind != "file") {
      s.fail("kind", "must be uniform, cosine or file");
    } else if (cfg.rho0.kind == "file" && cfg.rho0.path.empty()) {
      s.fail("path", "required when kind is file");
    } else if (cfg.rho0.kind == "cosine" &&
               !(std::abs(cfg.rho0.amplitude) < 1.0 && cfg.rho0.wavenumber >= 1)) {
      s.fail("amplitude", "cosine density needs |amplitude| < 1 and wavenumber >= 1");
    }
  }
  {
    Section s(top.child("simulate"), "simulate", problems, {"N", "replicas", "noise"});
    s.get("N", cfg.simulate.n_particles);
    s.get("replicas", cfg.simulate.replicas);
    s.get("noise", cfg.simulate.noise);
    if (cfg.simulate.n_particles < 2) s.fail("N", "must be >= 2");
    if (cfg.simulate.replicas < 1) s.fail("replicas", "must be >= 1");
  }
  {
    Section s(top.child("solve_pde"), "solve_pde", problems, {"checkpoints", "dt"});
    cfg.solve_pde.dt = cfg.dt;
    s.get("dt", cfg.solve_pde.dt);
    s.get("checkpoints", cfg.solve_pde.checkpoints);
    for (double t : cfg.solve_pde.checkpoints) {
      if (!(t >= 0.0 && t <= cfg.horizon)) s.fail("checkpoints", "times must lie in [0, T]");
    }
    if (cfg.solve_pde.checkpoints.empty() || cfg.solve_pde.checkpoints.back() != cfg.horizon) {
      cfg.solve_pde.checkpoints.push_back(cfg.horizon);
    }
    if (!(cfg.solve_pde.dt > 0.0) || !integral_ratio(cfg.horizon, cfg.solve_pde.dt)) {
      s.fail("dt", "need dt > 0 with T / dt an integer");
    }
  }
  {
    Section s(top.child("concentration"), "concentration", problems,
              {"N_list", "epsilon_list", "p", "replicas", "mode", "delta_coupling", "pde_dt"});
    auto& c = cfg.concentration;
    c.pde_dt = cfg.dt;
    s.get("N_list", c.n_list);
    s.get("epsilon_list", c.epsilon_list);
    s.get("p", c.p);
    s.get("replicas", c.replicas);
    s.get("mode", c.mode);
    s.get("delta_coupling", c.delta_coupling);
    s.get("pde_dt", c.pde_dt);
    if (c.mode != "particle" && c.mode != "iid_baseline") {
      s.fail("mode", "must be particle or iid_baseline");
    }
  }
  {
    Section s(top.child("entropy_sweep"), "entropy_sweep", problems, {"N_list", "replicas", "bins"});
    auto& e = cfg.entropy_sweep;
    e.bins = dim == 1 ? 32 : 16;
    s.get("N_list", e.n_list);
    s.get("replicas", e.replicas);
    s.get("bins", e.bins);
    if (e.bins < 1) s.fail("bins", "must be >= 1");
  }
  if (top.has("dv_check")) {
    Section s(top.child("dv_check"), "dv_check", problems, {"mu", "A", "grid_steps"});
    DvCheckSection dv;
    if (!s.has("mu")) s.fail("mu", "required");
    if (!s.has("A")) s.fail("A", "required");
    s.get("mu", dv.mu);
    s.get("A", dv.subset);
    s.get("grid_steps", dv.grid_steps);
    if (dv.mu.empty() || dv.mu.size() > 4) s.fail("mu", "must have 1 to 4 entries");
    for (int i : dv.subset) {
      if (i < 1 || i > static_cast<int>(dv.mu.size())) {
        s.fail("A", "state index " + std::to_string(i) + " outside 1.." +
                        std::to_string(dv.mu.size()));
      }
    }
    if (dv.grid_steps < 1) s.fail("grid_steps", "must be >= 1");
    cfg.dv_check = dv;
  }
  {
    Section s(top.child("kernel_info"), "kernel_info", problems, {"resolution"});
    s.get("resolution", cfg.kernel_info.resolution);
    if (cfg.kernel_info.resolution < 16) s.fail("resolution", "must be >= 16");
  }

  if (problems.empty()) {
    try {
      Kernel k(cfg.kernel);
    } catch (const InvalidArgument& e) {
      problems.push_back(std::string("kernel: ") + e.what());
    }
    try {
      Drift f(cfg.drift);
    } catch (const InvalidArgument& e) {
      problems.push_back(std::string("drift: ") + e.what());
    }
  }
  if (!problems.empty()) throw ConfigError(problems);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({"config '" + path + "' is not valid JSON: " + e.what()});
  }
  return parse_config(doc);
}

ExperimentPlan RunConfig::concentration_plan() const {
  ExperimentPlan plan;
  plan.dim = dim;
  plan.grid_n = grid_n;
  plan.horizon = horizon;
  plan.dt = dt;
  plan.pde_dt = concentration.pde_dt;
  plan.kernel = kernel;
  plan.drift = drift;
  plan.rho0 = rho0;
  plan.n_list = concentration.n_list;
  plan.epsilon_list = concentration.epsilon_list;
  plan.p = concentration.p;
  plan.replicas = concentration.replicas;
  plan.mode = parse_mode(concentration.mode);
  plan.seed = seed;
  plan.delta_coupling = concentration.delta_coupling;
  plan.bins = entropy_sweep.bins;
  return plan;
}

ExperimentPlan RunConfig::entropy_plan() const {
  ExperimentPlan plan = concentration_plan();
  plan.mode = SamplingMode::particle;
  plan.n_list = entropy_sweep.n_list;
  plan.replicas = entropy_sweep.replicas;
  plan.epsilon_list = {1.0};
  return plan;
}

void validate_for(const RunConfig& config, Command command) {
  std::vector<std::string> problems;
  auto check_plan = [&](const ExperimentPlan& plan, const std::string& section) {
    try {
      plan.validate();
    } catch (const InvalidArgument& e) {
      std::istringstream lines(e.what());
      std::string line;
      std::getline(lines, line);
      while (std::getline(lines, line)) {
        const auto pos = line.find("- ");
        problems.push_back(section + ": " + (pos == std::string::npos ? line : line.substr(pos + 2)));
      }
    }
  };
  switch (command) {
    case Command::concentration:
      check_plan(config.concentration_plan(), "concentration");
      break;
    case Command::entropy_sweep: {
      check_plan(config.entropy_plan(), "entropy_sweep");
      const auto b = static_cast<long long>(config.entropy_sweep.bins);
      const long long cells = config.dim == 1 ? b : b * b;
      if (config.entropy_sweep.replicas < 100 * cells) {
        problems.push_back("entropy_sweep.replicas: must be >= 100 * bins^d = " +
                           std::to_string(100 * cells));
      }
      break;
    }
    case Command::dv_check:
      if (!config.dv_check) problems.push_back("dv_check: section required for dv-check");
      break;
    case Command::simulate:
    case Command::solve_pde:
    case Command::kernel_info:
      break;
  }
  if (!problems.empty()) throw ConfigError(problems);
}

void apply_overrides(RunConfig& config, const Options& options, const char* env_seed) {
  if (options.seed) {
    config.seed = *options.seed;
  } else if (env_seed != nullptr && *env_seed != '\0') {
    const std::string s(env_seed);
    unsigned long long v = 0;
    try {
      if (s.find_first_not_of("0123456789") != std::string::npos) throw std::invalid_argument(s);
      v = std::stoull(s);
    } catch (const std::exception&) {
      throw ConfigError({"CHAOSLAB_SEED: expected a non-negative integer, got '" + s + "'"});
    }
    config.seed = v;
  }
  if (options.output_dir) config.output_dir = *options.output_dir;
}

ordered_json RunConfig::to_json() const {
  ordered_json j;
  j["schema_version"] = schema_version;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["d"] = dim;
  j["grid_n"] = grid_n;
  j["T"] = horizon;
  j["dt"] = dt;
  ordered_json k;
  k["family"] = std::string(family_name(kernel.family));
  k["amplitude"] = kernel.amplitude;
  k["amplitudes"] = array_of(kernel.amplitudes);
  k["m_trunc"] = kernel.m_trunc;
  k["wavenumber"] = kernel.wavenumber;
  k["delta"] = kernel.delta;
  j["kernel"] = k;
  ordered_json f;
  f["family"] = std::string(family_name(drift.family));
  std::vector<double> value;
  for (int a = 0; a < dim; ++a) value.push_back(drift.value[a]);
  f["value"] = array_of(value);
  f["amplitude"] = drift.amplitude;
  f["wavenumber"] = drift.wavenumber;
  j["drift"] = f;
  ordered_json r;
  r["kind"] = rho0.kind;
  r["amplitude"] = rho0.amplitude;
  r["wavenumber"] = rho0.wavenumber;
  r["path"] = rho0.path;
  j["rho0"] = r;
  j["simulate"] = {{"N", simulate.n_particles},
                   {"replicas", simulate.replicas},
                   {"noise", simulate.noise}};
  j["solve_pde"] = {{"checkpoints", array_of(solve_pde.checkpoints)}, {"dt", solve_pde.dt}};
  ordered_json c;
  c["N_list"] = array_of(concentration.n_list);
  c["epsilon_list"] = array_of(concentration.epsilon_list);
  c["p"] = concentration.p;
  c["replicas"] = concentration.replicas;
  c["mode"] = concentration.mode;
  c["delta_coupling"] = concentration.delta_coupling;
  c["pde_dt"] = concentration.pde_dt;
  j["concentration"] = c;
  j["entropy_sweep"] = {{"N_list", array_of(entropy_sweep.n_list)},
                        {"replicas", entropy_sweep.replicas},
                        {"bins", entropy_sweep.bins}};
  if (dv_check) {
    j["dv_check"] = {{"mu", array_of(dv_check->mu)},
                     {"A", array_of(dv_check->subset)},
                     {"grid_steps", dv_check->grid_steps}};
  }
  j["kernel_info"] = {{"resolution", kernel_info.resolution}};
  return j;
}

}  // namespace chaoslab::cli
