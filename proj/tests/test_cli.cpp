// Copyright 2026 The Reflectolab Authors.
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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(testing::TempDir()) / "cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir.parent_path());
  return dir;
}

std::string config(const std::string& name) { return std::string(REFLECTOLAB_CONFIG_DIR) + "/" + name; }

// Runs the CLI and returns its exit status.
int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = "env -u REFLECTOLAB_SEED " + env + " " + std::string(REFLECTOLAB_CLI) + " " + args +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const fs::path p = fs::path(testing::TempDir()) / name;
  std::ofstream(p) << text;
  return p;
}

const char* kSmallSim =
    "command: simulate\ndomain: {kind: orthant, dim: 2}\n"
    "diffusion:\n  start: [0.5, 0.5]\n  reflection: {matrix: [[1.0, -0.2], [-0.2, 1.0]]}\n"
    "simulation: {dt: 0.01, paths: 64}\n";

TEST(Cli, GeometryCheckOnOrthant) {
  const fs::path out = scratch("geometry");
  EXPECT_EQ(run("geometry-check " + config("geometry_orthant.yaml") + " -o " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_TRUE(fs::exists(out / "report.json"));
  EXPECT_TRUE(fs::exists(out / "samples.csv"));
  const std::string manifest = slurp(out / "manifest.json");
  EXPECT_NE(manifest.find("\"version\": \"0.3.0\""), std::string::npos);
  EXPECT_NE(manifest.find("\"config_hash\": \"fnv1a64:"), std::string::npos);
  EXPECT_NE(manifest.find("\"wall_time_seconds\""), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("hitting-check " + config("hitting_orthant.yaml") + " -o " + scratch("hit").string()), 2);
  const fs::path out = scratch("nonpd");
  EXPECT_EQ(run("simulate " + config("nonpd_covariance.yaml") + " -o " + out.string()), 1);
  const std::string err = slurp(out / "error.json");
  EXPECT_NE(err.find("ValidationError"), std::string::npos);
  EXPECT_NE(err.find("diffusion.covariance"), std::string::npos);
  EXPECT_NE(run("bogus-command x.yaml"), 0);
}

TEST(Cli, SeedPrecedence) {
  const fs::path cfg = write_config("unseeded.yaml", kSmallSim);
  const fs::path none = scratch("seed_none");
  EXPECT_EQ(run("simulate " + cfg.string() + " -o " + none.string()), 1);
  EXPECT_NE(slurp(none / "error.json").find("seed"), std::string::npos);

  const fs::path env = scratch("seed_env");
  EXPECT_EQ(run("simulate " + cfg.string() + " -o " + env.string(), "REFLECTOLAB_SEED=77"), 0);
  EXPECT_NE(slurp(env / "manifest.json").find("\"seed_source\": \"environment\""), std::string::npos);

  const fs::path flag = scratch("seed_flag");
  EXPECT_EQ(run("--seed 77 simulate " + cfg.string() + " -o " + flag.string(), "REFLECTOLAB_SEED=5"), 0);
  EXPECT_NE(slurp(flag / "manifest.json").find("\"seed_source\": \"flag\""), std::string::npos);
  EXPECT_EQ(slurp(env / "report.json"), slurp(flag / "report.json"));
  EXPECT_EQ(slurp(env / "samples.csv"), slurp(flag / "samples.csv"));
}

TEST(Cli, RepeatRunsAreByteIdentical) {
  const fs::path cfg = write_config("det.yaml", kSmallSim);
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  EXPECT_EQ(run("simulate " + cfg.string() + " --seed 3 --threads 1 --dump-paths -o " + a.string()), 0);
  EXPECT_EQ(run("simulate " + cfg.string() + " --seed 3 --threads 2 --dump-paths -o " + b.string()), 0);
  for (const char* f : {"report.json", "report.txt", "samples.csv", "paths.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_FALSE(slurp(a / "paths.csv").empty());
}

TEST(Cli, BinaryPathDump) {
  const fs::path cfg = write_config("bin.yaml", kSmallSim);
  const fs::path out = scratch("bin");
  EXPECT_EQ(run("simulate " + cfg.string() + " --seed 3 --binary-paths -o " + out.string()), 0);
  const std::string bytes = slurp(out / "paths.rlpf");
  ASSERT_GT(bytes.size(), 4u);
  EXPECT_EQ(bytes.substr(0, 4), "RLPF");
  EXPECT_FALSE(fs::exists(out / "paths.csv"));
}

TEST(Cli, ExperimentRefusalNamesTheCheck) {
  const std::string text =
      "command: experiment\nsimulation: {dt: 0.02, paths: 100}\n"
      "experiment:\n  theorem: polyhedral\n  family: {kind: constant, domain: {kind: orthant, dim: 2}}\n"
      "  diffusion:\n    start: [1.0, 1.0]\n    covariance: [[1.0, 0.5], [0.5, 1.0]]\n"
      "  indices: [1, 2]\n  probes: {box: {lo: [0.0, 0.0], hi: [2.0, 2.0]}, h: 0.5}\n"
      "  band: {splits: 10}\n";
  const fs::path cfg = write_config("refuse.yaml", text);
  const fs::path out = scratch("refuse");
  EXPECT_EQ(run("experiment " + cfg.string() + " --seed 1 -o " + out.string()), 2);
  const std::string report = slurp(out / "report.json");
  EXPECT_NE(report.find("\"refused\": true"), std::string::npos);
  EXPECT_NE(report.find("HittingConditionFailed"), std::string::npos);

  const fs::path over = scratch("override");
  const int status = run("experiment " + cfg.string() + " --seed 1 --unsound-override -o " + over.string());
  EXPECT_TRUE(status == 0 || status == 2);
  EXPECT_NE(slurp(over / "report.json").find("\"unsound\": true"), std::string::npos);
}

}  // namespace
