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

// Monte Carlo convergence experiments. Each experiment simulates Z_n on a
// ladder of indices and the limit Z_0, then compares continuous path
// functionals of Z_n with those of Z_0. The comparison is a battery of
// necessary conditions for weak convergence in C([0, T]), not a path-space
// metric.

#ifndef REFLECTOLAB_HARNESS_HPP_
#define REFLECTOLAB_HARNESS_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reflectolab/diffusion.hpp"
#include "reflectolab/set_convergence.hpp"
#include "reflectolab/simulation.hpp"
#include "reflectolab/statistics.hpp"

namespace reflectolab {

struct PathFunctionals {
  Vec terminal;
  double sup_norm = 0.0;
  double local_time = 0.0;
  double modulus = 0.0;
  bool stopped = false;
};

// sup |Z(s) - Z(t)| over grid times with |s - t| <= delta.
double modulus_of_continuity(const PathSample& path, double delta);

PathFunctionals path_functionals(const PathSample& path, double modulus_delta = 0.01);

enum class Theorem { kDomainSequence, kPolyhedral, kExpanding, kPunctured };
enum class LimitKind { kReflected, kNonReflected };
enum class Coupling { kCommon, kIndependent };

std::string_view theorem_name(Theorem t) noexcept;

struct ExperimentSpec {
  std::string name = "experiment";
  Theorem theorem = Theorem::kDomainSequence;
  LimitKind limit_kind = LimitKind::kReflected;
  DomainSequence domains;
  // Problem n on D_n; n = 0 is the limit.
  std::function<DiffusionSpec(int)> problem;
  std::vector<int> indices{1, 2, 4, 8, 16};
  SimulationOptions simulation;
  std::size_t paths = 10000;
  std::uint64_t seed = 0;
  // Common: path i of every ensemble reuses one seed. Independent: every
  // ensemble draws fresh seeds.
  Coupling coupling = Coupling::kCommon;
  ProbeSet probes = ProbeSet::box_grid(Vec::Constant(2, -2.0), Vec::Constant(2, 2.0), 0.02);
  double modulus_delta = 0.01;
  int band_splits = 100;
  double band_quantile = 0.99;
  double band_cap = 3.0;  // band <= cap * mean self-distance
  std::size_t energy_cap = kEnergySubsample;
  // Neighbourhood of z_0 that must sit inside D_n (expanding domains).
  double containment_radius = 1.0;
  bool unsound_override = false;
  unsigned threads = 0;

  int dim() const noexcept { return domains.dim(); }
  void validate() const;
};

inline constexpr const char* kFunctionalNames[] = {"terminal_ks", "terminal_energy", "sup_norm_ks",
                                                   "local_time_ks", "modulus_ks"};
inline constexpr std::size_t kFunctionalCount = 5;

struct FunctionalSamples {
  Mat terminal;                   // kept paths x d
  std::vector<std::size_t> path_ids;  // ensemble index of each kept path
  std::vector<double> sup_norm;
  std::vector<double> local_time;
  std::vector<double> modulus;
  std::size_t total = 0;
  std::size_t stopped = 0;
  std::size_t with_local_time = 0;  // kept paths with l(T) > 0
  std::size_t correction_events = 0;
  double max_residual = 0.0;

  std::size_t kept() const noexcept { return sup_norm.size(); }
};

// Simulates `count` paths and reduces them to functional samples in path
// order; stopped paths are counted and excluded.
FunctionalSamples collect_functionals(const Domain& domain, const DiffusionSpec& spec,
                                      const SimulationOptions& options, std::size_t count,
                                      std::uint64_t base_seed, unsigned threads,
                                      double modulus_delta);

// The five statistics of kFunctionalNames between two sample sets.
std::array<double, kFunctionalCount> functional_distances(const FunctionalSamples& a,
                                                          const FunctionalSamples& b,
                                                          std::size_t energy_cap);

struct Diagnostic {
  std::string name;            // e.g. "weak_gap"
  std::vector<double> values;  // one per ladder index
  bool shrinking = true;
  std::string note;
};

struct IndexResult {
  int index = 0;
  std::array<double, kFunctionalCount> distances{};
  std::size_t kept = 0;
  std::size_t stopped = 0;
  double stopped_fraction = 0.0;
  double local_time_fraction = 0.0;  // paths with l(T) > 0
  std::size_t correction_events = 0;
  double max_residual = 0.0;
};

struct ConvergenceReport {
  std::string name;
  Theorem theorem = Theorem::kDomainSequence;
  LimitKind limit_kind = LimitKind::kReflected;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  std::vector<IndexResult> results;
  std::array<double, kFunctionalCount> self_distance{};  // Z_0 vs Z_0'
  std::array<double, kFunctionalCount> null_mean{};
  std::array<double, kFunctionalCount> band{};
  double limit_stopped_fraction = 0.0;
  double limit_local_time_fraction = 0.0;
  std::vector<Diagnostic> diagnostics;
  std::optional<HittingCheck> hitting;
  bool unsound = false;
  // Per functional: indices i where d_{i+1} > d_i + band.
  std::array<std::vector<int>, kFunctionalCount> trend_violations;
  // Per functional: final two indices inside the band.
  std::array<bool, kFunctionalCount> within_band{};
  bool pass = false;
};

// Hypothesis diagnostics along the ladder: weak gap, field gaps and the
// exceptional-set condition. Values are finite or +inf.
std::vector<Diagnostic> hypothesis_diagnostics(const ExperimentSpec& spec);

// Throws kHypothesisDiagnosticsFailed naming every diagnostic that does not
// shrink by the final index.
void require_shrinking(const std::vector<Diagnostic>& diagnostics);

// Receives the functional samples of each simulated ensemble (index 0 is
// the limit) before they are compared.
using SampleSink = std::function<void(int index, const FunctionalSamples& samples)>;

ConvergenceReport run_theorem21_experiment(const ExperimentSpec& spec, const SampleSink& sink = {});
ConvergenceReport run_theorem32_experiment(const ExperimentSpec& spec, const SampleSink& sink = {});
ConvergenceReport run_theorem52_experiment(const ExperimentSpec& spec, const SampleSink& sink = {});
ConvergenceReport run_theorem53_experiment(const ExperimentSpec& spec, const SampleSink& sink = {});

// Dispatches on spec.theorem.
ConvergenceReport run_experiment(const ExperimentSpec& spec, const SampleSink& sink = {});

// Canonical JSON text (stable key order and number formatting).
std::string report_to_json(const ConvergenceReport& report);
// Aligned plain-text table.
std::string report_to_text(const ConvergenceReport& report);

}  // namespace reflectolab

#endif  // REFLECTOLAB_HARNESS_HPP_
