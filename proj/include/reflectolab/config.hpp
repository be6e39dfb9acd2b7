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

// Run configuration files. The grammar is YAML restricted to mappings,
// scalars and homogeneous lists; docs/config.md is the reference.

#ifndef REFLECTOLAB_CONFIG_HPP_
#define REFLECTOLAB_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reflectolab/diffusion.hpp"
#include "reflectolab/geometry.hpp"
#include "reflectolab/harness.hpp"
#include "reflectolab/set_convergence.hpp"
#include "reflectolab/simulation.hpp"

namespace reflectolab {

// kParseError carries a source position; kValidationError a key path such
// as "diffusion.covariance". Line and column are 1-based, 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(ErrorCode code, std::string key_path, int line, int column, const std::string& what);

  const std::string& key_path() const noexcept { return key_path_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  std::string key_path_;
  int line_;
  int column_;
};

struct GeometryCheckConfig {
  ProbeSet probes;
  double boundary_h = 1e-3;
  double collar = 1e-6;
};

enum class ConvergenceMetric {
  kWeak,
  kWijsmanBoundary,
  kWijsmanDomain,
  kWijsmanComplement,
  kHausdorff,
  kConditionB,
};

std::string_view convergence_metric_name(ConvergenceMetric m) noexcept;

struct ConvergenceConfig {
  DomainSequence family;
  std::vector<int> indices{1, 2, 4, 8, 16};
  ProbeSet probes;
  std::vector<ConvergenceMetric> metrics{ConvergenceMetric::kWeak};
  std::optional<Box> hausdorff_box;
  double hausdorff_h = 0.01;
};

struct RunConfigFile {
  std::optional<std::string> command;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<Domain> domain;
  std::optional<DiffusionSpec> diffusion;
  SimulationOptions simulation;
  std::size_t paths = 1;
  std::optional<GeometryCheckConfig> geometry;
  std::optional<ConvergenceConfig> convergence;
  std::optional<ExperimentSpec> experiment;
};

// Parses and fully validates a configuration document. Throws ConfigError.
RunConfigFile parse_config(std::string_view text);

// 64-bit FNV-1a of the raw bytes.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace reflectolab

#endif  // REFLECTOLAB_CONFIG_HPP_
