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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chaoslab/error.hpp"
#include "chaoslab/grid.hpp"
#include "chaoslab/harness.hpp"
#include "chaoslab/kernels.hpp"
#include "json.hpp"

namespace chaoslab::cli {

enum class Command { simulate, solve_pde, concentration, entropy_sweep, dv_check, kernel_info };

std::string_view command_name(Command c);
std::optional<Command> parse_command(std::string_view name);

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitVerification = 4,
  kExitInfinite = 5,
};

/// Config validation failure; what() lists every violated field, one per line.
class ConfigError : public InvalidArgument {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct SimulateSection {
  int n_particles = 64;
  int replicas = 1;
  bool noise = true;
};

struct SolvePdeSection {
  std::vector<double> checkpoints;  // always resolved to end at T
  double dt = 0.0;
};

struct ConcentrationSection {
  std::vector<int> n_list{64, 128, 256, 512};
  std::vector<double> epsilon_list{0.05, 0.1, 0.2};
  double p = 1.0;
  int replicas = 2000;
  std::string mode = "particle";
  bool delta_coupling = false;
  double pde_dt = 0.0;
};

struct EntropySweepSection {
  std::vector<int> n_list{64, 128, 256, 512};
  int replicas = 20000;
  int bins = 0;
};

struct DvCheckSection {
  std::vector<double> mu;
  std::vector<int> subset;  // 1-based state indices
  int grid_steps = 200;
};

struct KernelInfoSection {
  int resolution = 64;
};

/// Fully resolved run configuration (schema_version 1).
struct RunConfig {
  int schema_version = 1;
  std::uint64_t seed = 0;
  std::string output_dir = "chaoslab_out";
  int dim = 1;
  int grid_n = 256;
  double horizon = 0.5;
  double dt = 0.5 / 400;
  KernelSpec kernel;
  DriftSpec drift;
  DensitySpec rho0;
  SimulateSection simulate;
  SolvePdeSection solve_pde;
  ConcentrationSection concentration;
  EntropySweepSection entropy_sweep;
  std::optional<DvCheckSection> dv_check;
  KernelInfoSection kernel_info;

  /// The manifest form: every field with its resolved value.
  nlohmann::ordered_json to_json() const;

  /// Plans for the harness commands.
  ExperimentPlan concentration_plan() const;
  ExperimentPlan entropy_plan() const;
};

/// Parses and validates a config document. Unknown keys are rejected at every
/// level and reported by their dotted path. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// Semantic checks needed by one command (e.g. dv_check section present).
void validate_for(const RunConfig& config, Command command);

struct Options {
  Command command = Command::simulate;
  std::string config_path;
  int workers = 1;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
};

/// Seed precedence: --seed flag, then CHAOSLAB_SEED, then the config.
void apply_overrides(RunConfig& config, const Options& options, const char* env_seed);

/// Runs a command; outputs go to config.output_dir, human-readable summary to `log`.
int run_command(Command command, const RunConfig& config, int workers, std::ostream& log);

/// Full entry point: argument parsing, config loading, error to exit-code mapping.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace chaoslab::cli
