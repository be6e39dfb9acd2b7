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

/* C interface to reflectolab. Objects are opaque handles created by the
 * rl_*_create functions and released with the matching rl_*_free. Every
 * fallible call returns an rl_status; on failure the message is available
 * from rl_last_error_message() on the same thread. Matrices are row-major. */

#ifndef REFLECTOLAB_REFLECTOLAB_H_
#define REFLECTOLAB_REFLECTOLAB_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RL_API __declspec(dllexport)
#else
#define RL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rl_status {
  RL_OK = 0,
  RL_DIMENSION_MISMATCH = 1,
  RL_INVALID_DOMAIN = 2,
  RL_AMBIGUOUS_PROJECTION = 3,
  RL_CENTER_SINGULAR = 4,
  RL_NOT_PD = 5,
  RL_NOT_SYMMETRIC = 6,
  RL_NOT_INWARD_POINTING = 7,
  RL_HYPOTHESES_NOT_MET = 8,
  RL_UNSUPPORTED = 9,
  RL_SOLVER_DIVERGED = 10,
  RL_CONTRACTION_VIOLATED = 11,
  RL_RAY_MISSES = 12,
  RL_ITERATION_CAP = 13,
  RL_UNBOUNDED_WITHOUT_BOX = 14,
  RL_NOT_MONOTONE = 15,
  RL_PROJECTION_FAILED = 16,
  RL_NOT_FOUND = 17,
  RL_HYPOTHESIS_DIAGNOSTICS_FAILED = 18,
  RL_HITTING_CONDITION_FAILED = 19,
  RL_INVALID_ARGUMENT = 20,
  RL_PARSE_ERROR = 21,
  RL_VALIDATION_ERROR = 22,
  RL_IO_ERROR = 23,
  RL_SIMULATION_FAILED = 24,
  RL_INTERNAL_ERROR = 99
} rl_status;

typedef struct rl_domain rl_domain;
typedef struct rl_diffusion rl_diffusion;
typedef struct rl_path rl_path;

RL_API const char* rl_version(void);
RL_API const char* rl_status_name(rl_status status);
/* Message of the last failed call on this thread; "" if none. */
RL_API const char* rl_last_error_message(void);

/* Domains. */
RL_API rl_status rl_domain_orthant(int dim, rl_domain** out);
RL_API rl_status rl_domain_whole_space(int dim, rl_domain** out);
/* normals: faces x dim, unit rows. */
RL_API rl_status rl_domain_polyhedron(int dim, int faces, const double* normals,
                                      const double* offsets, rl_domain** out);
RL_API rl_status rl_domain_ball(int dim, const double* center, double radius, rl_domain** out);
RL_API rl_status rl_domain_half_space(int dim, const double* normal, double offset,
                                      rl_domain** out);
RL_API void rl_domain_free(rl_domain* domain);
RL_API int rl_domain_dim(const rl_domain* domain);

RL_API rl_status rl_signed_distance(const rl_domain* domain, const double* x, double* out);
/* out: dim values. */
RL_API rl_status rl_project_onto_closure(const rl_domain* domain, const double* x, double* out);
RL_API rl_status rl_exceptional_set_distance(const rl_domain* domain, const double* x,
                                             double* out);

/* Diffusions: standard Brownian motion from `start` with normal reflection,
 * then adjusted field by field. */
RL_API rl_status rl_diffusion_create(int dim, const double* start, rl_diffusion** out);
RL_API void rl_diffusion_free(rl_diffusion* diffusion);
RL_API rl_status rl_diffusion_set_drift(rl_diffusion* diffusion, const double* drift);
/* a: dim x dim. */
RL_API rl_status rl_diffusion_set_covariance(rl_diffusion* diffusion, const double* a);
/* r: dim x faces, column i is the direction on face i. */
RL_API rl_status rl_diffusion_set_reflection_matrix(rl_diffusion* diffusion, int faces,
                                                    const double* r);

/* Corner-avoidance test for SRBM in the orthant; r and a are dim x dim. */
RL_API rl_status rl_hitting_check(int dim, const double* r, const double* a,
                                  int* avoids_corners, double* spectral_radius);

typedef struct rl_sim_options {
  double horizon;
  double dt;
  double exceptional_collar;
  int max_halvings;
} rl_sim_options;

RL_API void rl_sim_options_default(rl_sim_options* options);

RL_API rl_status rl_simulate(const rl_domain* domain, const rl_diffusion* diffusion,
                             const rl_sim_options* options, uint64_t seed, rl_path** out);
RL_API void rl_path_free(rl_path* path);
/* Number of stored time points (steps + 1). */
RL_API size_t rl_path_length(const rl_path* path);
RL_API int rl_path_dim(const rl_path* path);
/* time, state (dim values), local time and reflection term (dim values) at
 * step k; any output pointer may be NULL. */
RL_API rl_status rl_path_at(const rl_path* path, size_t k, double* time, double* state,
                            double* local_time, double* reflection);
/* 1 and *step = tau_V if the path stopped at the exceptional set, else 0. */
RL_API int rl_path_stopped(const rl_path* path, size_t* step);

typedef void (*rl_log_fn)(const char* message, void* user);

typedef struct rl_run_options {
  int has_seed;
  uint64_t seed;
  unsigned threads; /* 0: from the config, else all cores */
  int dump_paths;
  int binary_paths;
  int unsound_override;
  int verbosity;
  rl_log_fn log;
  void* log_user;
} rl_run_options;

RL_API void rl_run_options_default(rl_run_options* options);

/* Runs one command (NULL or "" takes it from the config) and writes the
 * artifacts to out_dir. *exit_status follows the CLI convention: 0 pass or
 * complete, 2 verdict FAIL, 1 error. Returns RL_OK unless the run failed
 * with an error. *summary, if requested, must be released with
 * rl_free_string. */
RL_API rl_status rl_run_command(const char* command, const char* config_text,
                                const char* out_dir, const rl_run_options* options,
                                int* exit_status, char** summary);
RL_API void rl_free_string(char* s);

#ifdef __cplusplus
}
#endif

#endif /* REFLECTOLAB_REFLECTOLAB_H_ */
