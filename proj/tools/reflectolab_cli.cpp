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

// reflectolab command-line front-end. A thin shell over the C interface.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "reflectolab/reflectolab.h"

namespace {

void log_line(const char* message, void*) { std::fprintf(stderr, "reflectolab: %s\n", message); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reflected diffusions on converging domains"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rl_version());

  unsigned threads = 0;
  std::uint64_t seed = 0;
  bool dump_paths = false;
  bool binary_paths = false;
  bool unsound = false;
  int verbosity = 0;
  std::string config_path;
  std::string out_dir = "reflectolab-out";

  auto* seed_opt = app.add_option("--seed", seed, "Base seed (overrides the config and REFLECTOLAB_SEED)");
  app.add_option("--threads", threads, "Worker threads (default: all cores)")->check(CLI::PositiveNumber);
  app.add_flag("--dump-paths", dump_paths, "Write every simulated path to paths.csv");
  app.add_flag("--binary-paths", binary_paths, "Write every simulated path to paths.rlpf");
  app.add_flag("--unsound-override", unsound, "Run experiments whose limit may hit the corners");
  app.add_flag("-v,--verbose", verbosity, "Progress messages on stderr");

  const char* commands[][2] = {
      {"simulate", "Simulate an ensemble of reflected paths"},
      {"geometry-check", "Signed distances and the nearest-point check on probe points"},
      {"domain-convergence", "Set-convergence metrics along a domain family"},
      {"hitting-check", "Corner-avoidance test for SRBM in the orthant"},
      {"experiment", "Convergence experiment for a sequence of reflected diffusions"}};
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c[0], c[1]);
    sub->fallthrough();
    sub->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  std::ifstream in(config_path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  if (!in) {
    std::fprintf(stderr, "reflectolab: cannot read %s\n", config_path.c_str());
    return 1;
  }

  rl_run_options options;
  rl_run_options_default(&options);
  options.has_seed = seed_opt->count() > 0 ? 1 : 0;
  options.seed = seed;
  options.threads = threads;
  options.dump_paths = dump_paths ? 1 : 0;
  options.binary_paths = binary_paths ? 1 : 0;
  options.unsound_override = unsound ? 1 : 0;
  options.verbosity = verbosity;
  options.log = log_line;

  int exit_status = 1;
  char* summary = nullptr;
  const rl_status s = rl_run_command(command.c_str(), text.str().c_str(), out_dir.c_str(), &options,
                                     &exit_status, &summary);
  if (s != RL_OK) {
    std::fprintf(stderr, "reflectolab: %s: %s\n", rl_status_name(s), rl_last_error_message());
  } else if (summary) {
    std::printf("%s (%s)\n", summary, out_dir.c_str());
  }
  rl_free_string(summary);
  return exit_status;
}
