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

// Command runner shared by the C API and the command-line front-end. Every
// command reads one configuration document and writes its artifacts into a
// single output directory.

#ifndef REFLECTOLAB_APP_HPP_
#define REFLECTOLAB_APP_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace reflectolab {

inline constexpr const char* kVersion = "0.3.0";
inline constexpr const char* kSeedEnvVar = "REFLECTOLAB_SEED";

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFail = 2;

struct RunOptions {
  std::string command;  // empty: take it from the config
  std::string config_text;
  std::string config_label;  // recorded in the manifest
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool dump_paths = false;
  bool binary_paths = false;
  bool unsound_override = false;
  int verbosity = 0;
  std::function<void(const std::string&)> log;
};

struct RunOutcome {
  int exit_status = kExitError;
  int error_code = 0;  // ErrorCode value when exit_status is kExitError
  std::string summary;
  std::vector<std::string> files;  // written, relative to out_dir
};

enum class SeedSource { kFlag, kConfig, kEnvironment, kNone };

struct ResolvedSeed {
  std::optional<std::uint64_t> seed;
  SeedSource source = SeedSource::kNone;
};

// --seed, then the config, then REFLECTOLAB_SEED. Throws kValidationError on
// a malformed environment value.
ResolvedSeed resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> config,
                          const char* env_value);

std::string_view seed_source_name(SeedSource s) noexcept;

// Never throws: failures are written to error.json and reported as exit 1.
RunOutcome run_command(const RunOptions& options);

}  // namespace reflectolab

#endif  // REFLECTOLAB_APP_HPP_
