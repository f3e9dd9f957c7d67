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

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "chaoslab/cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace chaoslab;
using namespace chaoslab::cli;

namespace {

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("chaoslab_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::string& command, const fs::path& config, const fs::path& out_dir,
        const std::string& extra = "", const std::string& env = "") {
  const fs::path so = out_dir.string() + ".stdout";
  const fs::path se = out_dir.string() + ".stderr";
  const std::string cmd = env + " " + CHAOSLAB_BIN + std::string(" ") + command + " --config " +
                          config.string() + " --output-dir " + out_dir.string() + " " + extra +
                          " > " + so.string() + " 2> " + se.string();
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return {WEXITSTATUS(status), read_file(so), read_file(se)};
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("simulate writes one row per particle and is reproducible") {
  const auto cfg = write_config("sim.json",
                                R"({"schema_version":1,"seed":7,"T":0.01,"dt":0.01,"simulate":{"N":4}})");
  const auto out = scratch_dir() / "sim";
  const Run r = run("simulate", cfg, out);
  CHECK(r.code == 0);
  const std::string csv = read_file(out / "positions.csv");
  CHECK(line_count(csv) == 5u);
  CHECK(csv.rfind("replica,particle_index,x1\n", 0) == 0);
  const auto out2 = scratch_dir() / "sim2";
  CHECK(run("simulate", cfg, out2).code == 0);
  CHECK(read_file(out2 / "positions.csv") == csv);
  CHECK(fs::exists(out / "manifest.json"));
}

TEST_CASE("config errors name the field and exit 2") {
  const auto bad = write_config("bad.json", R"({"schema_version":1,"simulate":{"Npartcles":4}})");
  const Run r = run("simulate", bad, scratch_dir() / "bad");
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("simulate.Npartcles") != std::string::npos);

  const auto missing = write_config("nover.json", R"({"seed":1})");
  CHECK(run("simulate", missing, scratch_dir() / "nover").code == kExitConfig);

  const auto eps = write_config("eps.json",
                                R"({"schema_version":1,"concentration":{"epsilon_list":[0.0]}})");
  const Run e = run("concentration", eps, scratch_dir() / "eps");
  CHECK(e.code == kExitConfig);
  CHECK(e.err.find("epsilon") != std::string::npos);

  CHECK(run("simulate", scratch_dir() / "does_not_exist.json", scratch_dir() / "nofile").code ==
        kExitConfig);
  CHECK(run("dv-check", write_config("nodv.json", R"({"schema_version":1})"), scratch_dir() / "nodv")
            .code == kExitConfig);
}

TEST_CASE("dv-check exit codes") {
  const auto ok = write_config("dv.json", R"({"schema_version":1,"dv_check":{"mu":[0.5,0.25,0.25],"A":[2,3]}})");
  const Run r = run("dv-check", ok, scratch_dir() / "dv");
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("verdict=") != std::string::npos);
  const auto report = nlohmann::json::parse(read_file(scratch_dir() / "dv" / "dv_report.json"));
  CHECK(report["gap"].get<double>() < 1e-9);

  const auto uni = write_config("dvu.json", R"({"schema_version":1,"dv_check":{"mu":[0.3333333333333333,0.3333333333333333,0.3333333333333334],"A":[1]}})");
  CHECK(run("dv-check", uni, scratch_dir() / "dvu").code == kExitOk);

  const auto zero = write_config("dv0.json", R"({"schema_version":1,"dv_check":{"mu":[0.5,0.5,0],"A":[3]}})");
  CHECK(run("dv-check", zero, scratch_dir() / "dv0").code == kExitInfinite);

  // Indices are 1-based.
  const auto range = write_config("dvr.json", R"({"schema_version":1,"dv_check":{"mu":[0.5,0.5],"A":[0]}})");
  CHECK(run("dv-check", range, scratch_dir() / "dvr").code == kExitConfig);
}

TEST_CASE("numerical failure exits 3") {
  const auto cfg = write_config("blow.json", R"({"schema_version":1,"grid_n":64,"T":2.5,"dt":0.05,
    "kernel":{"family":"gradient_of_potential","amplitude":-40},
    "rho0":{"kind":"cosine","amplitude":0.9}})");
  const Run r = run("solve-pde", cfg, scratch_dir() / "blow");
  CHECK(r.code == kExitNumerical);
}

TEST_CASE("seed precedence: flag, then environment, then config") {
  const auto cfg = write_config("seed.json",
                                R"({"schema_version":1,"seed":5,"T":0.01,"dt":0.01,"simulate":{"N":3}})");
  auto seed_of = [&](const std::string& name, const std::string& extra, const std::string& env) {
    const auto out = scratch_dir() / name;
    REQUIRE(run("simulate", cfg, out, extra, env).code == 0);
    return nlohmann::json::parse(read_file(out / "manifest.json"))["seed"].get<std::uint64_t>();
  };
  CHECK(seed_of("s_cfg", "", "") == 5u);
  CHECK(seed_of("s_env", "", "CHAOSLAB_SEED=11") == 11u);
  CHECK(seed_of("s_flag", "--seed 13", "CHAOSLAB_SEED=11") == 13u);
  CHECK(run("simulate", cfg, scratch_dir() / "s_bad", "", "CHAOSLAB_SEED=abc").code == kExitConfig);

  // Different seeds give different positions; equal seeds equal positions.
  CHECK(read_file(scratch_dir() / "s_env" / "positions.csv") !=
        read_file(scratch_dir() / "s_flag" / "positions.csv"));
  seed_of("s_env2", "", "CHAOSLAB_SEED=11");
  CHECK(read_file(scratch_dir() / "s_env" / "positions.csv") ==
        read_file(scratch_dir() / "s_env2" / "positions.csv"));
}

TEST_CASE("manifest reproduces the run") {
  const auto cfg = write_config("k.json", R"({"schema_version":1,"d":2,"kernel":{"family":"biot_savart_2d","m_trunc":16}})");
  const auto out = scratch_dir() / "kinfo";
  const Run r = run("kernel-info", cfg, out);
  REQUIRE(r.code == 0);
  const auto info = nlohmann::json::parse(read_file(out / "kernel_info.json"));
  CHECK(info["antisymmetry_error"].get<double>() < 1e-12);
  CHECK(info["max_mode_divergence"].get<double>() < 1e-10);
  CHECK(std::abs(info["grid_mean"][0].get<double>()) < 1e-10);

  const auto out2 = scratch_dir() / "kinfo2";
  REQUIRE(run("kernel-info", out / "manifest.json", out2).code == 0);
  CHECK(read_file(out2 / "kernel_info.json") == read_file(out / "kernel_info.json"));

  const RunConfig parsed = load_config((out / "manifest.json").string());
  CHECK(parsed.to_json() == nlohmann::ordered_json::parse(read_file(out / "manifest.json")));
}

TEST_CASE("concentration writes the CSV schema and is worker independent") {
  const auto cfg = write_config("conc.json", R"({"schema_version":1,"seed":1,"T":0.1,"dt":0.0025,
    "kernel":{"family":"smooth_trig","amplitude":1.0},
    "concentration":{"N_list":[16,32,64,128],"epsilon_list":[0.05,0.1,0.2],"replicas":200}})");
  const Run a = run("concentration", cfg, scratch_dir() / "c1", "--workers 1");
  const Run b = run("concentration", cfg, scratch_dir() / "c3", "--workers 3");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  const std::string csv = read_file(scratch_dir() / "c1" / "concentration.csv");
  CHECK(line_count(csv) == 13u);
  CHECK(csv.rfind("mode,p,d,N,epsilon,M,exceed_count,p_hat,wilson_lo,wilson_hi,a_p,seed\n", 0) == 0);
  CHECK(csv == read_file(scratch_dir() / "c3" / "concentration.csv"));
  const auto fits = nlohmann::json::parse(read_file(scratch_dir() / "c1" / "rate_fits.json"));
  CHECK(fits.size() == 3u);
  for (const auto& f : fits) {
    CHECK(f.contains("slope"));
    CHECK(f.contains("r2"));
    CHECK(f.contains("a_p"));
  }
  CHECK(fs::exists(scratch_dir() / "c1" / "rho_bar_T.csv"));
}

TEST_CASE("solve-pde checkpoints") {
  const auto cfg = write_config("pde.json", R"({"schema_version":1,"grid_n":64,"T":0.1,"dt":0.001,
    "kernel":{"family":"smooth_trig"},"solve_pde":{"checkpoints":[0.05]}})");
  const auto out = scratch_dir() / "pde";
  REQUIRE(run("solve-pde", cfg, out).code == 0);
  const GridDensity mid = read_grid_csv((out / "rho_000.csv").string());
  const GridDensity end = read_grid_csv((out / "rho_001.csv").string());
  CHECK(mid.time == doctest::Approx(0.05));
  CHECK(end.time == doctest::Approx(0.1));
  CHECK(std::abs(end.mass() - 1.0) < 1e-12);
}

TEST_CASE("command names and usage errors") {
  CHECK(parse_command("entropy-sweep") == Command::entropy_sweep);
  CHECK(command_name(Command::kernel_info) == "kernel-info");
  CHECK_FALSE(parse_command("bogus").has_value());
  const std::string cmd = std::string(CHAOSLAB_BIN) + " bogus > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == kExitConfig);
}
