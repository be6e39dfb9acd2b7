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

// Euler scheme for reflected diffusions. Each step makes the unconstrained
// proposal y = Z + g(Z) dt + sigma(Z) dW and then applies the exact one-step
// boundary correction: a linear complementarity solve on polyhedra, a ray
// intersection along r(zeta(y)) on smooth boundaries. The correction size is
// the local-time increment.

#ifndef REFLECTOLAB_SIMULATION_HPP_
#define REFLECTOLAB_SIMULATION_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "reflectolab/diffusion.hpp"
#include "reflectolab/geometry.hpp"

namespace reflectolab {

struct SimulationOptions {
  double horizon = 1.0;
  double dt = 1e-3;
  // A path stops once dist(Z, V) drops below this collar.
  double exceptional_collar = 1e-3;
  // Step-halving retries for oversized smooth-boundary corrections.
  int max_halvings = 4;
  double lcp_tolerance = 1e-10;
  int lcp_max_sweeps = 10000;

  std::size_t steps() const;
  void validate() const;
};

struct StepCorrection {
  Vec proposed;
  Vec point;
  double local_time = 0.0;       // scalar increment of l
  Vec face_local_time;           // per-face increments (polyhedra)
  Vec reflection;                // increment of the reflection term L
  int iterations = 0;
};

// One-step Skorokhod problem on a polyhedron: find dL >= 0 with
// Z = y + R dL, N Z - b >= 0 and dL_i (n_i.Z - b_i) = 0, by projected
// Gauss-Seidel. `reflection` holds the normalised per-face columns.
StepCorrection skorokhod_step_polyhedron(const Polyhedron& domain, const Mat& reflection,
                                         const Vec& y, double tolerance = 1e-10,
                                         int max_sweeps = 10000);

// Pushes an exterior point back along r(zeta(y)) to the boundary of a ball,
// ball complement or half-space. Identity for points in the closure.
StepCorrection oblique_correction_smooth(const Domain& domain, const ReflectionField& field,
                                         const Vec& y);

struct PathSample {
  int dim = 0;
  int faces = 0;  // polyhedral face count, 0 otherwise
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::vector<double> states;           // (steps + 1) x dim, row-major
  std::vector<double> local_time;       // steps + 1
  std::vector<double> reflection;       // (steps + 1) x dim
  std::vector<double> face_local_time;  // (steps + 1) x faces
  std::optional<std::size_t> tau_v;     // first step with dist(Z, V) < collar
  std::size_t correction_events = 0;
  double max_residual = 0.0;            // discrete decomposition residual

  std::size_t size() const noexcept { return times.size(); }
  bool stopped() const noexcept { return tau_v.has_value(); }
  std::span<const double> state(std::size_t k) const {
    return {states.data() + k * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  std::span<const double> reflection_at(std::size_t k) const {
    return {reflection.data() + k * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  Vec state_vec(std::size_t k) const {
    return Eigen::Map<const Vec>(states.data() + k * static_cast<std::size_t>(dim), dim);
  }
};

// Reusable per-(domain, spec) stepping state. Construction validates the
// spec and the contraction condition rho(I - N R) < 1 for polyhedra.
class PathSimulator {
 public:
  PathSimulator(const Domain& domain, const DiffusionSpec& spec, SimulationOptions options);
  ~PathSimulator();
  PathSimulator(PathSimulator&&) noexcept;
  PathSimulator& operator=(PathSimulator&&) noexcept;

  PathSample run(std::uint64_t seed) const;

  const Domain& domain() const;
  const SimulationOptions& options() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

PathSample simulate_path(const Domain& domain, const DiffusionSpec& spec,
                         const SimulationOptions& options, std::uint64_t seed);

// Euler path with the same noise and no boundary (coupling reference).
PathSample simulate_unreflected_path(const DiffusionSpec& spec, const SimulationOptions& options,
                                     std::uint64_t seed);

// Discrete Skorokhod map on the half-line: l_k = max(0, max_{j<=k} -y_j),
// z_k = y_k + l_k. Requires y_0 >= 0.
std::pair<std::vector<double>, std::vector<double>> skorokhod_map_1d(std::span<const double> y);

// Seed of path `index` in an ensemble.
std::uint64_t ensemble_path_seed(std::uint64_t base_seed, std::size_t index) noexcept;

// Runs `count` paths, calling visit(index, path) from worker threads (each
// index exactly once). Per-path failures are collected and rethrown as one
// kSimulationFailed error listing the indices.
void for_each_path(const Domain& domain, const DiffusionSpec& spec,
                   const SimulationOptions& options, std::size_t count, std::uint64_t base_seed,
                   unsigned threads, const std::function<void(std::size_t, PathSample&&)>& visit);

std::vector<PathSample> simulate_ensemble(const Domain& domain, const DiffusionSpec& spec,
                                          const SimulationOptions& options, std::size_t count,
                                          std::uint64_t base_seed, unsigned threads = 0);

// Worker count used when `threads` is 0.
unsigned default_threads() noexcept;

}  // namespace reflectolab

#endif  // REFLECTOLAB_SIMULATION_HPP_
