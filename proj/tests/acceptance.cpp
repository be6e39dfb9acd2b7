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

// Acceptance suite. Prints one PASS or FAIL line per criterion plus INFO
// lines with the measured values, and exits non-zero when any criterion
// fails. Oracles are computed here, independently of the library code paths
// they check.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "reflectolab/app.hpp"
#include "reflectolab/config.hpp"
#include "reflectolab/diffusion.hpp"
#include "reflectolab/error.hpp"
#include "reflectolab/geometry.hpp"
#include "reflectolab/harness.hpp"
#include "reflectolab/set_convergence.hpp"
#include "reflectolab/simulation.hpp"
#include "reflectolab/statistics.hpp"

namespace {

using namespace reflectolab;
using Clock = std::chrono::steady_clock;

int g_failures = 0;

void info(const char* fmt, auto... args) {
  std::printf("INFO  ");
  std::printf(fmt, args...);
  std::printf("\n");
}

void verdict(int id, bool pass, const std::string& what, double seconds) {
  std::printf("%s criterion %d: %s (%.2f s)\n", pass ? "PASS" : "FAIL", id, what.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Runs one criterion, turning an escaped exception into a FAIL.
void criterion(int id, const std::string& what, double budget_seconds, const std::function<bool()>& body) {
  const auto t0 = Clock::now();
  bool pass = false;
  try {
    pass = body();
  } catch (const std::exception& e) {
    info("criterion %d raised: %s", id, e.what());
  }
  const double s = since(t0);
  if (s > budget_seconds) info("criterion %d exceeded its %.0f s budget", id, budget_seconds);
  verdict(id, pass && s <= budget_seconds, what, s);
}

// ---------------------------------------------------------------------------
// Geometry oracles.

constexpr double kOracleMesh = 1e-3;

// Boundary of a planar polyhedron sampled at spacing kOracleMesh. Face i is
// the part of the line n_i.x = b_i where every other constraint holds,
// clipped to |t| <= reach along the line.
std::vector<Vec> sample_polygon_boundary(const Mat& normals, const Vec& offsets, double reach) {
  std::vector<Vec> out;
  for (int i = 0; i < normals.rows(); ++i) {
    const Vec n = normals.row(i).transpose();
    const Vec foot = offsets(i) * n;
    Vec u(2);
    u << -n(1), n(0);
    double lo = -reach, hi = reach;
    for (int j = 0; j < normals.rows(); ++j) {
      if (j == i) continue;
      const double a = normals.row(j).dot(u);
      const double c = offsets(j) - normals.row(j).dot(foot);
      if (std::abs(a) < 1e-14) {
        if (c > 0) hi = lo - 1.0;
      } else if (a > 0) {
        lo = std::max(lo, c / a);
      } else {
        hi = std::min(hi, c / a);
      }
    }
    if (hi < lo) continue;
    const int steps = static_cast<int>(std::ceil((hi - lo) / kOracleMesh));
    for (int k = 0; k <= steps; ++k) out.push_back(foot + (lo + (hi - lo) * k / std::max(steps, 1)) * u);
  }
  return out;
}

double nearest(const std::vector<Vec>& cloud, const Vec& x) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec& p : cloud) best = std::min(best, (p - x).squaredNorm());
  return std::sqrt(best);
}

bool inside_polyhedron(const Mat& normals, const Vec& offsets, const Vec& x) {
  return ((normals * x - offsets).array() > 0.0).all();
}

// Distance from x to the 3-d orthant boundary: each face {x_i = 0, x_j >= 0}
// is scanned on a coarse grid and then at kOracleMesh around the coarse
// minimiser. Squared distance is separable in the face coordinates, so the
// coarse minimiser lies within one coarse cell of the true one.
double orthant3_boundary_distance(const Vec& x) {
  constexpr double kCoarse = 0.05;
  constexpr double kExtent = 4.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const int a = (i + 1) % 3, b = (i + 2) % 3;
    auto dist2 = [&](double u, double v) {
      return x(i) * x(i) + (x(a) - u) * (x(a) - u) + (x(b) - v) * (x(b) - v);
    };
    double cu = 0, cv = 0, cbest = std::numeric_limits<double>::infinity();
    for (double u = 0; u <= kExtent; u += kCoarse) {
      for (double v = 0; v <= kExtent; v += kCoarse) {
        if (const double d = dist2(u, v); d < cbest) cbest = d, cu = u, cv = v;
      }
    }
    for (double u = std::max(0.0, cu - kCoarse); u <= cu + kCoarse; u += kOracleMesh) {
      for (double v = std::max(0.0, cv - kCoarse); v <= cv + kCoarse; v += kOracleMesh) {
        best = std::min(best, dist2(u, v));
      }
    }
  }
  return std::sqrt(best);
}

std::vector<Vec> uniform_probes(int dim, std::size_t count, double half_width, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-half_width, half_width);
  std::vector<Vec> out(count, Vec(dim));
  for (Vec& p : out) {
    for (int k = 0; k < dim; ++k) p(k) = u(gen);
  }
  return out;
}

struct Agreement {
  double worst = 0.0;
  void add(double a, double b) { worst = std::max(worst, std::abs(a - b)); }
};

bool criterion1() {
  std::mt19937_64 gen(0x5EED);
  constexpr std::size_t kProbes = 1000;
  bool ok = true;
  auto judge = [&](const char* name, double worst, double tol) {
    info("%-34s max |phi - oracle| = %.3e (tolerance %.0e)", name, worst, tol);
    ok = ok && worst <= tol;
  };

  {  // 2-d orthant against the sampled boundary.
    const Domain d = Domain::orthant(2);
    const auto cloud = sample_polygon_boundary(d.as_polyhedron()->normals, d.as_polyhedron()->offsets, 8.0);
    Agreement a;
    for (const Vec& x : uniform_probes(2, kProbes, 2.0, gen)) {
      const double sign = (x.array() > 0).all() ? 1.0 : -1.0;
      a.add(signed_distance(d, x), sign * nearest(cloud, x));
    }
    judge("orthant d=2 (sampled)", a.worst, kOracleMesh);
  }
  {  // 3-d orthant against the coarse-to-fine face scan.
    const Domain d = Domain::orthant(3);
    Agreement a;
    for (const Vec& x : uniform_probes(3, kProbes, 2.0, gen)) {
      const double sign = (x.array() > 0).all() ? 1.0 : -1.0;
      a.add(signed_distance(d, x), sign * orthant3_boundary_distance(x));
    }
    judge("orthant d=3 (sampled)", a.worst, kOracleMesh);
  }
  {  // Random planar polyhedra with 3 to 6 faces.
    Agreement sampled, interior;
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> slack(0.2, 1.0);
    for (int m = 3; m <= 6; ++m) {
      Mat normals(m, 2);
      Vec offsets(m);
      std::optional<Domain> built;
      // Redraw until every face is active; redundant faces are rejected.
      while (!built) {
        Vec c(2);
        c << 0.3 * g(gen), 0.3 * g(gen);
        for (int i = 0; i < m; ++i) {
          Vec n(2);
          n << g(gen), g(gen);
          n.normalize();
          normals.row(i) = n.transpose();
          offsets(i) = n.dot(c) - slack(gen);
        }
        try {
          built = Domain::polyhedron(normals, offsets);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kInvalidDomain) throw;
        }
      }
      const Domain& d = *built;
      const auto cloud = sample_polygon_boundary(normals, offsets, 12.0);
      for (const Vec& x : uniform_probes(2, kProbes / 4, 2.0, gen)) {
        const bool in = inside_polyhedron(normals, offsets, x);
        const double phi = signed_distance(d, x);
        sampled.add(phi, (in ? 1.0 : -1.0) * nearest(cloud, x));
        if (in) interior.add(phi, (normals * x - offsets).minCoeff());
      }
    }
    judge("polyhedra m=3..6 (sampled)", sampled.worst, kOracleMesh);
    judge("polyhedra interior (closed form)", interior.worst, 1e-9);
  }
  {  // Balls.
    Vec c(2);
    c << 0.2, -0.1;
    const double r = 1.1;
    const Domain d = Domain::ball(c, r);
    std::vector<Vec> circle;
    const int count = static_cast<int>(std::ceil(2 * std::numbers::pi * r / kOracleMesh));
    for (int k = 0; k < count; ++k) {
      const double t = 2 * std::numbers::pi * k / count;
      Vec p(2);
      p << c(0) + r * std::cos(t), c(1) + r * std::sin(t);
      circle.push_back(p);
    }
    Agreement sampled, closed;
    for (const Vec& x : uniform_probes(2, kProbes, 2.0, gen)) {
      const double phi = signed_distance(d, x);
      const double radial = r - (x - c).norm();
      sampled.add(phi, (radial > 0 ? 1.0 : -1.0) * nearest(circle, x));
      closed.add(phi, radial);
    }
    const Vec c3 = Vec::Constant(3, 0.25);
    const Domain d3 = Domain::ball(c3, 0.8);
    for (const Vec& x : uniform_probes(3, kProbes, 2.0, gen)) closed.add(signed_distance(d3, x), 0.8 - (x - c3).norm());
    judge("ball d=2 (sampled)", sampled.worst, kOracleMesh);
    judge("ball d=2,3 (closed form)", closed.worst, 1e-9);
  }
  {  // Half-spaces.
    Vec n(2);
    n << 0.6, 0.8;
    const Domain d = Domain::half_space(n, 0.3);
    Mat normals = n.transpose();
    Vec offsets = Vec::Constant(1, 0.3);
    const auto line = sample_polygon_boundary(normals, offsets, 8.0);
    Agreement sampled, closed;
    for (const Vec& x : uniform_probes(2, kProbes, 2.0, gen)) {
      const double phi = signed_distance(d, x);
      const double lin = n.dot(x) - 0.3;
      sampled.add(phi, (lin > 0 ? 1.0 : -1.0) * nearest(line, x));
      closed.add(phi, lin);
    }
    Vec n3(3);
    n3 << 2.0, -1.0, 2.0;
    n3 /= 3.0;
    const Domain d3 = Domain::half_space(n3, -0.4);
    for (const Vec& x : uniform_probes(3, kProbes, 2.0, gen)) closed.add(signed_distance(d3, x), n3.dot(x) + 0.4);
    judge("half-space d=2 (sampled)", sampled.worst, kOracleMesh);
    judge("half-space d=2,3 (closed form)", closed.worst, 1e-9);
  }
  return ok;
}

// ---------------------------------------------------------------------------
// Set convergence.

bool criterion2() {
  bool ok = true;
  const Vec origin = Vec::Zero(2);
  const ProbeSet k = ProbeSet::box_grid(Vec::Constant(2, -3.0), Vec::Constant(2, 3.0), 0.05);

  {  // Concentric balls with radius 1 + 1/n: the gap is |a_n - a_0| exactly.
    const DomainSequence seq = sequences::balls([&](int) { return origin; },
                                                [](int n) { return 1.0 + 1.0 / n; }, Domain::ball(origin, 1.0));
    double worst = 0.0;
    for (int n = 1; n <= 8; ++n) worst = std::max(worst, std::abs(weak_convergence_gap(seq, n, k) - 1.0 / n));
    info("ball family: max |gap - |a_n - a_0|| = %.3e (grid h = %.2f)", worst, k.h);
    ok = ok && worst <= k.h;
  }
  {  // Radii oscillating between 0.5 and 1.5 never converge.
    const DomainSequence seq = sequences::balls([&](int) { return origin; },
                                                [](int n) { return n % 2 ? 0.5 : 1.5; }, Domain::ball(origin, 1.0));
    double least = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= 8; ++n) least = std::min(least, weak_convergence_gap(seq, n, k));
    info("oscillating balls: min gap over n = 1..8 is %.4f", least);
    ok = ok && least >= 0.5 - k.h;
  }
  {  // Slit: Wijsman convergence of the closures without weak convergence.
    const DomainSequence seq = sequences::slit();
    Vec x0(2);
    x0 << 0.0, 1.0;
    const ProbeSet at_x0 = ProbeSet::points_only({x0});
    const ProbeSet box = ProbeSet::box_grid(Vec::Constant(2, -1.0), Vec::Constant(2, 2.0), 0.01);
    bool weak_ok = true;
    std::vector<double> wijsman;
    for (int n = 1; n <= 8; ++n) {
      const double g = weak_convergence_gap(seq, n, at_x0);
      wijsman.push_back(wijsman_gap(seq, n, WijsmanTarget::kDomain, box));
      info("slit n=%d: weak gap at (0,1) = %.6f, closed-form 1 - 2^-(n+1) = %.6f, Wijsman gap = %.6f", n, g,
           1.0 - std::ldexp(1.0, -n - 1), wijsman.back());
      weak_ok = weak_ok && g >= 0.9;
    }
    const bool wijsman_ok = wijsman.back() <= 2 * 0.01 && wijsman.back() < wijsman.front();
    info("slit: weak gap >= 0.9 for every n: %s; Wijsman gap -> 0: %s", weak_ok ? "yes" : "no",
         wijsman_ok ? "yes" : "no");
    ok = ok && weak_ok && wijsman_ok;
  }
  {  // Rotating quadrant with angle 1/n.
    const DomainSequence seq = sequences::rotating_quadrant([](int n) { return 1.0 / n; });
    const ProbeSet fixed = ProbeSet::box_grid(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0), 0.02);
    std::vector<double> gaps;
    for (int n : {1, 2, 4, 8, 16, 32}) gaps.push_back(weak_convergence_gap(seq, n, fixed));
    const bool weak_ok = std::is_sorted(gaps.rbegin(), gaps.rend()) && gaps.back() <= 0.05;
    info("rotating quadrant: weak gap on [-1,1]^2 from %.4f (n=1) to %.4f (n=32)", gaps.front(), gaps.back());
    const Domain d4 = seq.at(4), d0 = seq.at(0);
    std::vector<double> radii{2.0, 4.0, 8.0}, haus;
    for (double r : radii) {
      haus.push_back(hausdorff_distance(d4, d0, 0.05, Box{Vec::Constant(2, -r), Vec::Constant(2, r)}));
      info("rotating quadrant n=4: Hausdorff estimate on [-%.0f,%.0f]^2 = %.4f (ratio to radius %.4f)", r, r,
           haus.back(), haus.back() / r);
    }
    const double slope_lo = haus[0] / radii[0], slope_hi = haus[2] / radii[2];
    const bool linear = haus[2] > 3.0 * haus[0] && std::abs(slope_hi - slope_lo) <= 0.2 * slope_hi;
    ok = ok && weak_ok && linear;
  }
  return ok;
}

// ---------------------------------------------------------------------------
// One-dimensional exactness.

bool criterion3() {
  const Domain half_line = Domain::orthant(1);
  const Domain half_space = Domain::half_space(Vec::Ones(1), 0.0);
  const Mat reflection = Mat::Identity(1, 1);
  const ReflectionField normal = ReflectionField::normal();
  std::mt19937_64 gen(0xB0B0B0B0);
  std::normal_distribution<double> g(0.0, std::sqrt(1e-3));
  double worst = 0.0;
  for (int seq = 0; seq < 1000; ++seq) {
    std::vector<double> free_path{0.0};
    double z_lcp = 0.0, z_ray = 0.0, l_lcp = 0.0, l_ray = 0.0;
    std::vector<double> lcp{0.0}, ray{0.0}, lt_lcp{0.0}, lt_ray{0.0};
    for (int k = 0; k < 1000; ++k) {
      const double xi = g(gen);
      free_path.push_back(free_path.back() + xi);
      const StepCorrection a = skorokhod_step_polyhedron(*half_line.as_polyhedron(), reflection,
                                                         Vec::Constant(1, z_lcp + xi));
      const StepCorrection b = oblique_correction_smooth(half_space, normal, Vec::Constant(1, z_ray + xi));
      z_lcp = a.point(0);
      z_ray = b.point(0);
      l_lcp += a.local_time;
      l_ray += b.local_time;
      lcp.push_back(z_lcp);
      ray.push_back(z_ray);
      lt_lcp.push_back(l_lcp);
      lt_ray.push_back(l_ray);
    }
    const auto [z_map, l_map] = skorokhod_map_1d(free_path);
    for (std::size_t k = 0; k < free_path.size(); ++k) {
      worst = std::max({worst, std::abs(lcp[k] - z_map[k]), std::abs(ray[k] - z_map[k]),
                        std::abs(lt_lcp[k] - l_map[k]), std::abs(lt_ray[k] - l_map[k])});
    }
  }
  info("1000 sequences of 1000 steps: max disagreement %.3e", worst);
  return worst <= 1e-12;
}

// ---------------------------------------------------------------------------
// Reflected Brownian motion on the half-line.

bool criterion4() {
  constexpr std::size_t kPaths = 100000;
  SimulationOptions options;
  options.horizon = 1.0;
  options.dt = 1e-3;
  std::vector<double> terminal(kPaths), local_time(kPaths);
  for_each_path(Domain::orthant(1), brownian_spec(Vec::Zero(1)), options, kPaths, 0xBA4D, 0,
                [&](std::size_t i, PathSample&& p) {
                  terminal[i] = std::abs(p.states.back());
                  local_time[i] = p.local_time.back();
                });
  const double ks = ks_one_sample(terminal, [](double x) { return x <= 0 ? 0.0 : std::erf(x / std::sqrt(2.0)); });
  double mean = 0.0;
  for (double v : local_time) mean += v;
  mean /= kPaths;
  double var = 0.0;
  for (double v : local_time) var += (v - mean) * (v - mean);
  const double se = std::sqrt(var / (kPaths - 1) / kPaths);
  const double target = std::sqrt(2.0 / std::numbers::pi);
  // Discrete monitoring of the running minimum misses about
  // 0.5826 sqrt(dt) of the local time (zeta(1/2) / sqrt(2 pi)).
  const double corrected = mean + 0.5826 * std::sqrt(options.dt);
  info("KS(|Z(1)|, half-normal) = %.4f (threshold 0.01)", ks);
  info("mean l(1) = %.4f, standard error %.4f, target %.4f, |z| = %.1f", mean, se, target,
       std::abs(mean - target) / se);
  info("mean l(1) with the discrete-monitoring correction = %.4f (|z| = %.1f)", corrected,
       std::abs(corrected - target) / se);
  return ks < 0.01 && std::abs(mean - target) <= 3 * se;
}

// ---------------------------------------------------------------------------
// Corner-avoidance checker.

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

bool criterion5() {
  bool ok = true;
  const Mat id = Mat::Identity(2, 2);
  const HittingCheck equality = check_hitting_condition(id, id);
  const HittingCheck correlated = check_hitting_condition(id, mat2(1.0, 0.5, 0.5, 1.0));
  info("R = I, A = I: avoids corners %s; R = I, a12 = 0.5: %s", equality.avoids_corners ? "true" : "false",
       correlated.avoids_corners ? "true" : "false");
  ok = ok && equality.avoids_corners && !correlated.avoids_corners;

  bool rejected = false;
  try {
    check_hitting_condition(mat2(1.0, 0.3, -0.2, 1.0), id);
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::kHypothesesNotMet;
  }
  info("positive off-diagonal in R rejected: %s", rejected ? "yes" : "no");
  ok = ok && rejected;

  // R = [[1, -a], [-b, 1]] gives I - R = [[0, a], [b, 0]] with spectral
  // radius sqrt(a b).
  double worst = 0.0;
  for (double a : {0.0, 0.1, 0.35, 0.6, 0.9}) {
    for (double b : {0.0, 0.2, 0.5, 0.95}) {
      const HittingCheck h = check_hitting_condition(mat2(1.0, -a, -b, 1.0), id);
      worst = std::max(worst, std::abs(h.spectral_radius - std::sqrt(a * b)));
    }
  }
  bool gate = false;
  try {
    check_hitting_condition(mat2(1.0, -1.2, -1.1, 1.0), id);
  } catch (const Error& e) {
    gate = e.code() == ErrorCode::kHypothesesNotMet;
  }
  info("spectral radius vs sqrt(ab): max error %.2e; rho = sqrt(1.32) rejected: %s", worst, gate ? "yes" : "no");
  return ok && worst <= 1e-8 && gate;
}

// ---------------------------------------------------------------------------
// Perturbed SRBM ladders in the orthant.

std::string config_path(const char* name) { return std::string(REFLECTOLAB_CONFIG_DIR) + "/" + name; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

bool ladder(const char* file) {
  RunConfigFile cfg = parse_config(slurp(config_path(file)));
  ExperimentSpec spec = *cfg.experiment;
  spec.indices = {1, 4, 16};
  const ConvergenceReport r = run_experiment(spec);
  bool ok = true;
  for (std::size_t f = 0; f < kFunctionalCount; ++f) {
    const double d1 = r.results[0].distances[f], d4 = r.results[1].distances[f], d16 = r.results[2].distances[f];
    const double band = r.band[f];
    int violations = (d4 > d1 + band) + (d16 > d4 + band);
    const bool in_band = d16 <= band;
    info("%s %-16s n=1 %.5f  n=4 %.5f  n=16 %.5f  band %.5f  %s, %d trend violation(s)", spec.name.c_str(),
         kFunctionalNames[f], d1, d4, d16, band, in_band ? "inside band" : "OUTSIDE band", violations);
    ok = ok && in_band && violations <= 1;
  }
  return ok;
}

bool criterion6() {
  const bool b = ladder("polyhedral_ladder.yaml");
  const bool r = ladder("reflection_ladder.yaml");
  info("offset ladder %s, reflection ladder %s", b ? "passes" : "fails", r ? "passes" : "fails");
  return b && r;
}

// ---------------------------------------------------------------------------
// Expanding balls.

bool criterion7() {
  constexpr std::size_t kPaths = 20000;
  SimulationOptions options;
  options.horizon = 1.0;
  options.dt = 1e-3;
  const DiffusionSpec bm = brownian_spec(Vec::Zero(2));
  std::atomic<std::size_t> touched{0};
  for_each_path(Domain::ball(Vec::Zero(2), 6.0), bm, options, kPaths, 0x5EED, 0, [&](std::size_t, PathSample&& p) {
    if (p.local_time.back() > 0) touched.fetch_add(1, std::memory_order_relaxed);
  });
  const double fraction = static_cast<double>(touched.load()) / kPaths;
  // Doob's inequality for exp(lambda |W|^2) with the best lambda gives
  // P(sup_{t<=1} |W_t| >= r) <= (r^2 / 2) exp(1 - r^2 / 2) in the plane.
  const double bound = 18.0 * std::exp(1.0 - 18.0);
  info("Ball(0,6): fraction with positive local time %.2e (threshold 1e-3, tail bound %.1e)", fraction, bound);

  const Domain big = Domain::ball(Vec::Zero(2), 32.0);
  std::size_t equal = 0;
  constexpr std::size_t kCoupled = 2000;
  for (std::size_t i = 0; i < kCoupled; ++i) {
    const std::uint64_t seed = ensemble_path_seed(0x5EED, i);
    const PathSample a = simulate_path(big, bm, options, seed);
    const PathSample b = simulate_unreflected_path(bm, options, seed);
    equal += a.states.size() == b.states.size() &&
             std::memcmp(a.states.data(), b.states.data(), a.states.size() * sizeof(double)) == 0;
  }
  info("Ball(0,32): %zu of %zu coupled paths bitwise equal to the unreflected scheme", equal, kCoupled);
  return fraction < 1e-3 && equal == kCoupled;
}

// ---------------------------------------------------------------------------
// Determinism.

bool criterion8() {
  const auto root = std::filesystem::temp_directory_path() / ("reflectolab-acceptance-" + std::to_string(getpid()));
  std::filesystem::remove_all(root);
  std::string text = slurp(config_path("reflection_ladder.yaml"));
  text.replace(text.find("paths: 20000"), 12, "paths: 2000");
  bool ok = true;
  struct Case {
    const char* label;
    std::string config;
  };
  const std::vector<Case> cases{{"experiment", text}, {"simulate", slurp(config_path("orthant_srbm_2d.yaml"))}};
  for (const Case& c : cases) {
    std::vector<std::filesystem::path> dirs;
    for (unsigned threads : {1u, 2u, 1u}) {
      RunOptions o;
      o.config_text = c.config;
      o.config_label = c.label;
      o.out_dir = root / (std::string(c.label) + std::to_string(dirs.size()));
      o.threads = threads;
      const RunOutcome out = run_command(o);
      ok = ok && out.exit_status != kExitError;
      dirs.push_back(o.out_dir);
    }
    for (const char* f : {"report.json", "report.txt", "samples.csv"}) {
      const std::string first = slurp(dirs[0] / f);
      const bool same = !first.empty() && first == slurp(dirs[1] / f) && first == slurp(dirs[2] / f);
      info("%s %s: %zu bytes, identical across three runs: %s", c.label, f, first.size(), same ? "yes" : "no");
      ok = ok && same;
    }
  }
  std::filesystem::remove_all(root);
  return ok;
}

}  // namespace

int main() {
  criterion(1, "signed distance against boundary-sampling and closed-form oracles", 10, criterion1);
  criterion(2, "ball, slit and rotating-quadrant set convergence", 10, criterion2);
  criterion(3, "one-dimensional steppers agree with the Skorokhod map", 5, criterion3);
  criterion(4, "reflected Brownian motion law on the half-line", 60, criterion4);
  criterion(5, "corner-avoidance checker", 1, criterion5);
  criterion(6, "perturbed orthant SRBM ladders", 600, criterion6);
  criterion(7, "expanding balls to Brownian motion", 300, criterion7);
  criterion(8, "byte-identical reports on re-run", 600, criterion8);
  std::printf("%s: %d criterion(s) failed\n", g_failures ? "FAIL" : "PASS", g_failures);
  return g_failures ? 1 : 0;
}
