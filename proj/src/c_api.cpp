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

#include "reflectolab/reflectolab.h"

#include <cstring>
#include <new>
#include <string>

#include "reflectolab/app.hpp"
#include "reflectolab/diffusion.hpp"
#include "reflectolab/error.hpp"
#include "reflectolab/geometry.hpp"
#include "reflectolab/simulation.hpp"

using namespace reflectolab;

struct rl_domain {
  Domain domain;
};

struct rl_diffusion {
  DiffusionSpec spec;
};

struct rl_path {
  PathSample path;
};

namespace {

thread_local std::string last_error;

rl_status set_error(rl_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <typename F>
rl_status guard(F&& f) {
  try {
    last_error.clear();
    f();
    return RL_OK;
  } catch (const Error& e) {
    return set_error(static_cast<rl_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(RL_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return set_error(RL_INTERNAL_ERROR, e.what());
  }
}

void need(bool ok, const char* what) {
  if (!ok) fail(ErrorCode::kInvalidArgument, what);
}

Vec vec(const double* p, int n) { return Eigen::Map<const Vec>(p, n); }

Mat row_major(const double* p, int rows, int cols) {
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(p, rows, cols);
}

rl_status make_domain(rl_domain** out, const std::function<Domain()>& f) {
  return guard([&] {
    need(out != nullptr, "out is null");
    *out = new rl_domain{f()};
  });
}

}  // namespace

extern "C" {

const char* rl_version(void) { return kVersion; }

const char* rl_status_name(rl_status status) {
  if (status == RL_INTERNAL_ERROR) return "InternalError";
  static thread_local std::string name;
  name = std::string(error_code_name(static_cast<ErrorCode>(status)));
  return name.c_str();
}

const char* rl_last_error_message(void) { return last_error.c_str(); }

rl_status rl_domain_orthant(int dim, rl_domain** out) {
  return make_domain(out, [&] { return Domain::orthant(dim); });
}

rl_status rl_domain_whole_space(int dim, rl_domain** out) {
  return make_domain(out, [&] { return Domain::whole_space(dim); });
}

rl_status rl_domain_polyhedron(int dim, int faces, const double* normals, const double* offsets,
                               rl_domain** out) {
  return make_domain(out, [&] {
    need(normals && offsets && dim > 0 && faces > 0, "polyhedron: null or empty input");
    return Domain::polyhedron(row_major(normals, faces, dim), vec(offsets, faces));
  });
}

rl_status rl_domain_ball(int dim, const double* center, double radius, rl_domain** out) {
  return make_domain(out, [&] {
    need(center && dim > 0, "ball: null center");
    return Domain::ball(vec(center, dim), radius);
  });
}

rl_status rl_domain_half_space(int dim, const double* normal, double offset, rl_domain** out) {
  return make_domain(out, [&] {
    need(normal && dim > 0, "half_space: null normal");
    return Domain::half_space(vec(normal, dim), offset);
  });
}

void rl_domain_free(rl_domain* domain) { delete domain; }

int rl_domain_dim(const rl_domain* domain) { return domain ? domain->domain.dim() : 0; }

rl_status rl_signed_distance(const rl_domain* domain, const double* x, double* out) {
  return guard([&] {
    need(domain && x && out, "null argument");
    *out = signed_distance(domain->domain, vec(x, domain->domain.dim()));
  });
}

rl_status rl_project_onto_closure(const rl_domain* domain, const double* x, double* out) {
  return guard([&] {
    need(domain && x && out, "null argument");
    const Vec p = project_onto_closure(domain->domain, vec(x, domain->domain.dim()));
    std::memcpy(out, p.data(), sizeof(double) * static_cast<std::size_t>(p.size()));
  });
}

rl_status rl_exceptional_set_distance(const rl_domain* domain, const double* x, double* out) {
  return guard([&] {
    need(domain && x && out, "null argument");
    *out = exceptional_set_distance(domain->domain, vec(x, domain->domain.dim()));
  });
}

rl_status rl_diffusion_create(int dim, const double* start, rl_diffusion** out) {
  return guard([&] {
    need(out && start && dim > 0, "null argument");
    *out = new rl_diffusion{brownian_spec(vec(start, dim))};
  });
}

void rl_diffusion_free(rl_diffusion* diffusion) { delete diffusion; }

rl_status rl_diffusion_set_drift(rl_diffusion* diffusion, const double* drift) {
  return guard([&] {
    need(diffusion && drift, "null argument");
    diffusion->spec.drift = DriftField::constant(vec(drift, static_cast<int>(diffusion->spec.start.size())));
  });
}

rl_status rl_diffusion_set_covariance(rl_diffusion* diffusion, const double* a) {
  return guard([&] {
    need(diffusion && a, "null argument");
    const int d = static_cast<int>(diffusion->spec.start.size());
    diffusion->spec.covariance = CovarianceField::constant(row_major(a, d, d));
  });
}

rl_status rl_diffusion_set_reflection_matrix(rl_diffusion* diffusion, int faces, const double* r) {
  return guard([&] {
    need(diffusion && r && faces > 0, "null argument");
    const int d = static_cast<int>(diffusion->spec.start.size());
    diffusion->spec.reflection = ReflectionField::matrix(row_major(r, d, faces));
  });
}

rl_status rl_hitting_check(int dim, const double* r, const double* a, int* avoids_corners,
                           double* spectral_radius) {
  return guard([&] {
    need(r && a && dim > 0, "null argument");
    const HittingCheck h = check_hitting_condition(row_major(r, dim, dim), row_major(a, dim, dim));
    if (avoids_corners) *avoids_corners = h.avoids_corners ? 1 : 0;
    if (spectral_radius) *spectral_radius = h.spectral_radius;
  });
}

void rl_sim_options_default(rl_sim_options* options) {
  if (!options) return;
  const SimulationOptions d;
  options->horizon = d.horizon;
  options->dt = d.dt;
  options->exceptional_collar = d.exceptional_collar;
  options->max_halvings = d.max_halvings;
}

rl_status rl_simulate(const rl_domain* domain, const rl_diffusion* diffusion,
                      const rl_sim_options* options, uint64_t seed, rl_path** out) {
  return guard([&] {
    need(domain && diffusion && out, "null argument");
    SimulationOptions o;
    if (options) {
      o.horizon = options->horizon;
      o.dt = options->dt;
      o.exceptional_collar = options->exceptional_collar;
      o.max_halvings = options->max_halvings;
    }
    *out = new rl_path{simulate_path(domain->domain, diffusion->spec, o, seed)};
  });
}

void rl_path_free(rl_path* path) { delete path; }

size_t rl_path_length(const rl_path* path) { return path ? path->path.size() : 0; }

int rl_path_dim(const rl_path* path) { return path ? path->path.dim : 0; }

rl_status rl_path_at(const rl_path* path, size_t k, double* time, double* state, double* local_time,
                     double* reflection) {
  return guard([&] {
    need(path != nullptr, "null path");
    const PathSample& p = path->path;
    if (k >= p.size()) fail(ErrorCode::kInvalidArgument, "step index out of range");
    const auto d = static_cast<std::size_t>(p.dim);
    if (time) *time = p.times[k];
    if (state) std::memcpy(state, p.state(k).data(), sizeof(double) * d);
    if (local_time) *local_time = p.local_time[k];
    if (reflection) std::memcpy(reflection, p.reflection_at(k).data(), sizeof(double) * d);
  });
}

int rl_path_stopped(const rl_path* path, size_t* step) {
  if (!path || !path->path.tau_v) return 0;
  if (step) *step = *path->path.tau_v;
  return 1;
}

void rl_run_options_default(rl_run_options* options) {
  if (options) *options = rl_run_options{0, 0, 0, 0, 0, 0, 0, nullptr, nullptr};
}

rl_status rl_run_command(const char* command, const char* config_text, const char* out_dir,
                         const rl_run_options* options, int* exit_status, char** summary) {
  if (exit_status) *exit_status = kExitError;
  if (summary) *summary = nullptr;
  RunOutcome outcome;
  const rl_status s = guard([&] {
    need(config_text && out_dir, "config_text and out_dir are required");
    RunOptions o;
    if (command) o.command = command;
    o.config_text = config_text;
    o.out_dir = out_dir;
    if (options) {
      if (options->has_seed) o.seed = options->seed;
      if (options->threads) o.threads = options->threads;
      o.dump_paths = options->dump_paths != 0;
      o.binary_paths = options->binary_paths != 0;
      o.unsound_override = options->unsound_override != 0;
      o.verbosity = options->verbosity;
      if (options->log) {
        const rl_log_fn fn = options->log;
        void* user = options->log_user;
        o.log = [fn, user](const std::string& m) { fn(m.c_str(), user); };
      }
    }
    outcome = run_command(o);
  });
  if (s != RL_OK) return s;
  if (exit_status) *exit_status = outcome.exit_status;
  if (summary) {
    *summary = static_cast<char*>(std::malloc(outcome.summary.size() + 1));
    if (*summary) std::memcpy(*summary, outcome.summary.c_str(), outcome.summary.size() + 1);
  }
  if (outcome.exit_status == kExitError) {
    const rl_status code = outcome.error_code > 0 ? static_cast<rl_status>(outcome.error_code) : RL_INTERNAL_ERROR;
    return set_error(code, outcome.summary);
  }
  return RL_OK;
}

void rl_free_string(char* s) { std::free(s); }

}  // extern "C"
