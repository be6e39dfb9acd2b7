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

#include "reflectolab/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <mutex>
#include <string>
#include <thread>

#include "reflectolab/rng.hpp"

namespace reflectolab {
namespace {

constexpr int kMaxRayIterations = 100;
constexpr double kRayTolerance = 1e-12;

// Small dense solve for the active-set polish; nullopt when singular.
std::optional<Vec> solve_square(const Mat& a, const Vec& b) {
  if (a.rows() == 0) return Vec(0);
  Eigen::FullPivLU<Mat> lu(a);
  if (!lu.isInvertible()) return std::nullopt;
  return Vec(lu.solve(b));
}

// Smallest admissible root of |r|^2 t^2 + 2 (r.u) t + (|u|^2 - a^2) = 0,
// u = y - center. `outside_ball` selects the ball (smallest positive root)
// or its complement (the positive root leaving the hole).
double ray_sphere(const Vec& u, const Vec& r, double radius, bool outside_ball) {
  const double aa = r.squaredNorm();
  const double bb = r.dot(u);
  const double cc = u.squaredNorm() - radius * radius;
  const double disc = bb * bb - aa * cc;
  if (disc < 0.0) fail(ErrorCode::kRayMisses, "reflection ray misses the sphere");
  const double root = std::sqrt(disc);
  // Stable pair of roots.
  const double qq = -(bb + std::copysign(root, bb));
  double t1 = qq / aa;
  double t2 = qq != 0.0 ? cc / qq : t1;
  if (t1 > t2) std::swap(t1, t2);
  if (outside_ball) {
    if (t2 < 0.0) fail(ErrorCode::kRayMisses, "reflection ray points away from the ball");
    return std::max(t1, 0.0);
  }
  return std::max(t2, 0.0);
}

}  // namespace

std::size_t SimulationOptions::steps() const {
  return static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
}

void SimulationOptions::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) fail(ErrorCode::kInvalidArgument, "horizon must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorCode::kInvalidArgument, "dt must be positive");
  if (horizon / dt > 1e9) fail(ErrorCode::kInvalidArgument, "horizon / dt exceeds 1e9 steps");
  if (!(exceptional_collar >= 0.0)) fail(ErrorCode::kInvalidArgument, "exceptional_collar must be >= 0");
  if (max_halvings < 0 || max_halvings > 20) fail(ErrorCode::kInvalidArgument, "max_halvings must lie in [0, 20]");
  if (!(lcp_tolerance > 0.0)) fail(ErrorCode::kInvalidArgument, "lcp_tolerance must be positive");
  if (lcp_max_sweeps < 1) fail(ErrorCode::kInvalidArgument, "lcp_max_sweeps must be >= 1");
}

StepCorrection skorokhod_step_polyhedron(const Polyhedron& domain, const Mat& reflection,
                                         const Vec& y, double tolerance, int max_sweeps) {
  const Eigen::Index m = domain.normals.rows();
  const Eigen::Index d = domain.normals.cols();
  require_dim(y, static_cast<int>(d), "proposal");
  if (reflection.rows() != d || reflection.cols() != m) {
    fail(ErrorCode::kDimensionMismatch, "reflection matrix must be d x m");
  }
  StepCorrection out;
  out.proposed = y;
  out.face_local_time = Vec::Zero(m);
  out.reflection = Vec::Zero(d);
  const Vec q = domain.normals * y - domain.offsets;
  if (m == 0 || q.minCoeff() >= 0.0) {
    out.point = y;
    return out;
  }
  const Mat mm = domain.normals * reflection;
  Vec x = Vec::Zero(m);
  bool converged = false;
  int sweep = 0;
  while (sweep < max_sweeps) {
    ++sweep;
    double change = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double w = q(i) + mm.row(i).dot(x);
      const double next = std::max(0.0, x(i) - w / mm(i, i));
      change = std::max(change, std::abs(next - x(i)));
      x(i) = next;
    }
    if (change <= tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    fail(ErrorCode::kSolverDiverged,
         "projected Gauss-Seidel hit " + std::to_string(max_sweeps) + " sweeps");
  }
  // Active-set polish: solve the complementarity system exactly on the
  // support found by the sweeps.
  unsigned support = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (x(i) > 0.0) support |= 1u << i;
  }
  const int k = std::popcount(support);
  Mat a(k, k);
  Vec rhs(k);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (support & (1u << i)) idx.push_back(i);
  }
  for (int r = 0; r < k; ++r) {
    rhs(r) = -q(idx[r]);
    for (int c = 0; c < k; ++c) a(r, c) = mm(idx[r], idx[c]);
  }
  if (const auto exact = solve_square(a, rhs); exact && exact->minCoeff() >= 0.0) {
    Vec candidate = Vec::Zero(m);
    for (int r = 0; r < k; ++r) candidate(idx[r]) = (*exact)(r);
    const Vec w = q + mm * candidate;
    if (w.minCoeff() >= -tolerance) x = candidate;
  }
  out.face_local_time = x;
  out.reflection = reflection * x;
  out.point = y + out.reflection;
  out.local_time = x.sum();
  out.iterations = sweep;
  return out;
}

StepCorrection oblique_correction_smooth(const Domain& domain, const ReflectionField& field,
                                         const Vec& y) {
  require_dim(y, domain.dim(), "proposal");
  const bool ball = domain.as_ball() != nullptr;
  const bool hole = domain.as_ball_complement() != nullptr;
  const HalfSpace* half = domain.as_half_space();
  if (!ball && !hole && !half) {
    fail(ErrorCode::kUnsupported, std::string("smooth correction is not defined for ") +
                                      std::string(domain_kind_name(domain.kind())));
  }
  StepCorrection out;
  out.proposed = y;
  out.reflection = Vec::Zero(y.size());
  Vec z = y;
  int iter = 0;
  while (signed_distance(domain, z) < -kRayTolerance) {
    if (iter == kMaxRayIterations) {
      fail(ErrorCode::kIterationCap, "oblique correction did not reach the closure in " +
                                         std::to_string(kMaxRayIterations) + " iterations");
    }
    ++iter;
    const BoundaryPoint zeta = nearest_boundary_point(domain, z);
    const Vec r = field.at(zeta);
    double delta = 0.0;
    if (half) {
      const double rn = half->normal.dot(r);
      if (rn <= 0.0) fail(ErrorCode::kRayMisses, "reflection ray is parallel to the half-space");
      delta = (half->offset - half->normal.dot(z)) / rn;
    } else if (ball) {
      delta = ray_sphere(z - domain.as_ball()->center, r, domain.as_ball()->radius, true);
    } else {
      const auto* b = domain.as_ball_complement();
      delta = ray_sphere(z - b->center, r, b->radius, false);
    }
    z += delta * r;
    out.reflection += delta * r;
    out.local_time += delta;
  }
  out.point = std::move(z);
  out.iterations = iter;
  return out;
}

// --- PathSimulator ---

struct PathSimulator::Impl {
  enum class Mode { kFree, kPolyhedron, kSmooth };

  Domain domain;
  DiffusionSpec spec;
  SimulationOptions options;
  Mode mode = Mode::kFree;
  int dim = 0;
  int faces = 0;
  Mat normals;
  Vec offsets;
  Mat reflection;  // d x m
  bool has_exceptional = false;
  bool unit_sigma = false;

  Impl(const Domain& d, const DiffusionSpec& s, SimulationOptions o)
      : domain(d), spec(s), options(o), dim(d.dim()) {}

  struct Work {
    Vec drift;
    Vec noise;
    Vec y;
    Vec increment;      // y - z of the last proposal
    Vec unconstrained;  // z0 + sum g dt + sum sigma dW
    Vec reflection;     // cumulative L
    Vec face_lt;        // cumulative per-face local time
    double local_time = 0.0;
    bool corrected = false;
  };

  // Euler proposal y = z + g(z) h + sigma(z) dw, written element-wise so the
  // reflected and unreflected runs round identically.
  void propose(const Vec& z, double h, const Vec& dw, Work& w) const {
    spec.drift.evaluate(z, w.drift);
    if (unit_sigma) {
      w.noise = dw;
    } else if (spec.covariance.is_constant()) {
      w.noise.noalias() = spec.covariance.constant_sqrt() * dw;
    } else {
      w.noise.noalias() = spec.covariance.sqrt_at(z) * dw;
    }
    for (int i = 0; i < dim; ++i) {
      const double inc = w.drift(i) * h + w.noise(i);
      w.increment(i) = inc;
      w.y(i) = z(i) + inc;
      w.unconstrained(i) += inc;
    }
  }

  double covariance_norm(const Vec& z) const {
    if (spec.covariance.is_constant()) return spec.covariance.constant_norm();
    Eigen::SelfAdjointEigenSolver<Mat> eig(spec.covariance(z), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
  }

  void advance(const CounterRng& rng, std::uint64_t step, Vec& z, double h, const Vec& dw,
               int depth, std::uint32_t node, Work& w) const {
    propose(z, h, dw, w);
    switch (mode) {
      case Mode::kFree:
        z = w.y;
        return;
      case Mode::kPolyhedron: {
        bool inside = true;
        for (int i = 0; i < faces && inside; ++i) {
          inside = normals.row(i).dot(w.y) - offsets(i) >= 0.0;
        }
        if (inside) {
          z = w.y;
          return;
        }
        const StepCorrection c = skorokhod_step_polyhedron(
            *domain.as_polyhedron(), reflection, w.y, options.lcp_tolerance, options.lcp_max_sweeps);
        z = c.point;
        w.reflection += c.reflection;
        w.face_lt += c.face_local_time;
        w.local_time += c.local_time;
        w.corrected = w.corrected || c.local_time > 0.0;
        return;
      }
      case Mode::kSmooth: {
        if (signed_distance(domain, w.y) >= -kRayTolerance) {
          z = w.y;
          return;
        }
        StepCorrection c = oblique_correction_smooth(domain, spec.reflection, w.y);
        const double limit = 10.0 * std::sqrt(h * covariance_norm(z));
        if (depth < options.max_halvings && (c.point - w.y).norm() > limit) {
          // Undo this proposal and split the step with a Brownian bridge.
          w.unconstrained -= w.increment;
          Vec xi(dim);
          rng.normals(step, static_cast<std::uint32_t>(1 + depth) | (node << 8),
                      {xi.data(), static_cast<std::size_t>(xi.size())});
          const Vec mid = 0.5 * dw + std::sqrt(0.25 * h) * xi;
          const Vec rest = dw - mid;
          advance(rng, step, z, 0.5 * h, mid, depth + 1, 2 * node, w);
          advance(rng, step, z, 0.5 * h, rest, depth + 1, 2 * node + 1, w);
          return;
        }
        z = std::move(c.point);
        w.reflection += c.reflection;
        w.local_time += c.local_time;
        w.corrected = w.corrected || c.local_time > 0.0;
        return;
      }
    }
  }

  bool near_exceptional(const Vec& z) const {
    if (!has_exceptional) return false;
    const double collar = options.exceptional_collar;
    if (mode == Mode::kPolyhedron) {
      // dist(z, V) >= dist(z, boundary) = min slack inside the closure.
      const double slack = (normals * z - offsets).minCoeff();
      if (slack >= collar) return false;
    }
    return exceptional_set_distance(domain, z) < collar;
  }

  PathSample run(std::uint64_t seed) const {
    const std::size_t steps = options.steps();
    const auto d = static_cast<std::size_t>(dim);
    PathSample out;
    out.dim = dim;
    out.faces = faces;
    out.dt = options.dt;
    out.seed = seed;
    out.times.resize(steps + 1);
    out.states.resize((steps + 1) * d);
    out.local_time.assign(steps + 1, 0.0);
    out.reflection.assign((steps + 1) * d, 0.0);
    out.face_local_time.assign((steps + 1) * static_cast<std::size_t>(faces), 0.0);

    Work w;
    w.drift = Vec::Zero(dim);
    w.noise = Vec::Zero(dim);
    w.y = Vec::Zero(dim);
    w.increment = Vec::Zero(dim);
    w.unconstrained = spec.start;
    w.reflection = Vec::Zero(dim);
    w.face_lt = Vec::Zero(faces);
    Vec z = spec.start;
    Vec xi(dim);
    Vec dw(dim);
    const double sqrt_dt = std::sqrt(options.dt);
    const CounterRng rng(seed);

    auto record = [&](std::size_t k) {
      out.times[k] = static_cast<double>(k) * options.dt;
      for (std::size_t i = 0; i < d; ++i) {
        out.states[k * d + i] = z(static_cast<Eigen::Index>(i));
        out.reflection[k * d + i] = w.reflection(static_cast<Eigen::Index>(i));
      }
      out.local_time[k] = w.local_time;
      for (int i = 0; i < faces; ++i) {
        out.face_local_time[k * static_cast<std::size_t>(faces) + static_cast<std::size_t>(i)] = w.face_lt(i);
      }
      double residual = 0.0;
      for (int i = 0; i < dim; ++i) {
        residual = std::max(residual, std::abs(z(i) - (w.unconstrained(i) + w.reflection(i))));
      }
      out.max_residual = std::max(out.max_residual, residual);
    };

    record(0);
    if (near_exceptional(z)) out.tau_v = 0;
    for (std::size_t k = 0; k < steps; ++k) {
      if (out.tau_v) {
        record(k + 1);
        continue;
      }
      rng.normals(k, 0, {xi.data(), d});
      for (int i = 0; i < dim; ++i) dw(i) = sqrt_dt * xi(i);
      w.corrected = false;
      try {
        advance(rng, k, z, options.dt, dw, 0, 0, w);
      } catch (const Error& e) {
        throw Error(e.code(), "step " + std::to_string(k + 1) + ": " + e.what());
      }
      if (w.corrected) ++out.correction_events;
      record(k + 1);
      if (near_exceptional(z)) out.tau_v = k + 1;
    }
    return out;
  }
};

PathSimulator::PathSimulator(const Domain& domain, const DiffusionSpec& spec,
                             SimulationOptions options)
    : impl_(std::make_unique<Impl>(domain, spec, options)) {
  options.validate();
  spec.validate(domain);
  Impl& s = *impl_;
  const Mat& sigma = spec.covariance.constant_sqrt();
  s.unit_sigma = spec.covariance.is_constant() && sigma == Mat::Identity(s.dim, s.dim);
  switch (domain.kind()) {
    case DomainKind::kWholeSpace:
      s.mode = Impl::Mode::kFree;
      break;
    case DomainKind::kPuncturedSpace:
      s.mode = Impl::Mode::kFree;
      s.has_exceptional = !domain.as_punctured_space()->excluded.empty();
      break;
    case DomainKind::kPolyhedron: {
      const Polyhedron& p = *domain.as_polyhedron();
      s.mode = Impl::Mode::kPolyhedron;
      s.normals = p.normals;
      s.offsets = p.offsets;
      s.faces = static_cast<int>(p.normals.rows());
      s.reflection = spec.reflection.polyhedron_matrix(p);
      s.has_exceptional = s.faces >= 2;
      // Contraction on every set of faces that meet: rho(I - N_S R_S) < 1.
      const Mat mm = p.normals * s.reflection;
      for (unsigned mask = 1; mask < (1u << s.faces); ++mask) {
        const int k = std::popcount(mask);
        if (k < 2 || k > s.dim || !faces_meet(p, mask)) continue;
        std::vector<int> idx;
        for (int i = 0; i < s.faces; ++i) {
          if (mask & (1u << i)) idx.push_back(i);
        }
        Mat block(k, k);
        for (int r = 0; r < k; ++r) {
          for (int c = 0; c < k; ++c) block(r, c) = (r == c ? 1.0 : 0.0) - mm(idx[r], idx[c]);
        }
        const double rho = spectral_radius(block);
        if (rho >= 1.0) {
          std::string faces_list;
          for (int i : idx) faces_list += (faces_list.empty() ? "" : ",") + std::to_string(i + 1);
          fail(ErrorCode::kContractionViolated, "spectral radius of I - N R on faces {" +
                                                    faces_list + "} is " + std::to_string(rho) +
                                                    " (needs < 1)");
        }
      }
      break;
    }
    case DomainKind::kBall:
    case DomainKind::kHalfSpace:
    case DomainKind::kBallComplement:
      s.mode = Impl::Mode::kSmooth;
      break;
    case DomainKind::kNotchedHalfPlane:
      fail(ErrorCode::kUnsupported, "simulation on the notched half-plane is not supported");
  }
}

PathSimulator::~PathSimulator() = default;
PathSimulator::PathSimulator(PathSimulator&&) noexcept = default;
PathSimulator& PathSimulator::operator=(PathSimulator&&) noexcept = default;

PathSample PathSimulator::run(std::uint64_t seed) const { return impl_->run(seed); }
const Domain& PathSimulator::domain() const { return impl_->domain; }
const SimulationOptions& PathSimulator::options() const { return impl_->options; }

PathSample simulate_path(const Domain& domain, const DiffusionSpec& spec,
                         const SimulationOptions& options, std::uint64_t seed) {
  return PathSimulator(domain, spec, options).run(seed);
}

PathSample simulate_unreflected_path(const DiffusionSpec& spec, const SimulationOptions& options,
                                     std::uint64_t seed) {
  DiffusionSpec free_spec = spec;
  free_spec.reflection = ReflectionField::normal();
  const int d = static_cast<int>(spec.start.size());
  return PathSimulator(Domain::whole_space(d), free_spec, options).run(seed);
}

std::pair<std::vector<double>, std::vector<double>> skorokhod_map_1d(std::span<const double> y) {
  std::vector<double> z(y.size());
  std::vector<double> l(y.size());
  if (y.empty()) return {z, l};
  if (!(y[0] >= 0.0)) fail(ErrorCode::kInvalidArgument, "skorokhod_map_1d needs y_0 >= 0");
  double running = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    running = std::max(running, -y[k]);
    l[k] = running;
    z[k] = y[k] + running;
  }
  return {z, l};
}

std::uint64_t ensemble_path_seed(std::uint64_t base_seed, std::size_t index) noexcept {
  return derive_seed(base_seed, index);
}

unsigned default_threads() noexcept {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

void for_each_path(const Domain& domain, const DiffusionSpec& spec,
                   const SimulationOptions& options, std::size_t count, std::uint64_t base_seed,
                   unsigned threads, const std::function<void(std::size_t, PathSample&&)>& visit) {
  if (count == 0) fail(ErrorCode::kInvalidArgument, "path count must be >= 1");
  const PathSimulator sim(domain, spec, options);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(threads == 0 ? default_threads() : threads, count));
  std::atomic<std::size_t> next{0};
  std::mutex failures_mu;
  std::vector<std::pair<std::size_t, std::string>> failures;

  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        visit(i, sim.run(ensemble_path_seed(base_seed, i)));
      } catch (const std::exception& e) {
        const std::lock_guard<std::mutex> lock(failures_mu);
        failures.emplace_back(i, e.what());
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (!failures.empty()) {
    std::sort(failures.begin(), failures.end());
    std::string msg = std::to_string(failures.size()) + " of " + std::to_string(count) +
                      " paths failed;";
    for (std::size_t i = 0; i < failures.size() && i < 10; ++i) {
      msg += " [path " + std::to_string(failures[i].first) + "] " + failures[i].second + ";";
    }
    if (failures.size() > 10) msg += " ...";
    fail(ErrorCode::kSimulationFailed, msg);
  }
}

std::vector<PathSample> simulate_ensemble(const Domain& domain, const DiffusionSpec& spec,
                                          const SimulationOptions& options, std::size_t count,
                                          std::uint64_t base_seed, unsigned threads) {
  std::vector<PathSample> out(count);
  for_each_path(domain, spec, options, count, base_seed, threads,
                [&](std::size_t i, PathSample&& p) { out[i] = std::move(p); });
  return out;
}

}  // namespace reflectolab
