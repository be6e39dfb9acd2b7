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

#include <cmath>
#include <random>

#include "reflectolab/error.hpp"
#include "reflectolab/simulation.hpp"

namespace reflectolab {
namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Mat m2(double a, double b, double c, double d) { return (Mat(2, 2) << a, b, c, d).finished(); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

// Orthant LCP by enumeration of active sets: z = y + R x >= 0, x >= 0,
// x_i z_i = 0.
Vec lcp_by_enumeration(const Mat& r, const Vec& y) {
  const int d = static_cast<int>(y.size());
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < d; ++i) {
      if (mask & (1u << i)) s.push_back(i);
    }
    Vec x = Vec::Zero(d);
    if (!s.empty()) {
      Mat rs(s.size(), s.size());
      Vec ys(s.size());
      for (std::size_t a = 0; a < s.size(); ++a) {
        ys(a) = -y(s[a]);
        for (std::size_t b = 0; b < s.size(); ++b) rs(a, b) = r(s[a], s[b]);
      }
      const Vec xs = rs.fullPivLu().solve(ys);
      for (std::size_t a = 0; a < s.size(); ++a) x(s[a]) = xs(a);
    }
    const Vec z = y + r * x;
    if (x.minCoeff() >= -1e-12 && z.minCoeff() >= -1e-12) return x;
  }
  ADD_FAILURE() << "no complementary solution";
  return Vec::Zero(d);
}

TEST(LcpStep, NormalReflectionClampsEachCoordinate) {
  const Polyhedron q{Mat::Identity(2, 2), Vec::Zero(2)};
  const StepCorrection c = skorokhod_step_polyhedron(q, Mat::Identity(2, 2), v2(-1.0, 2.0));
  EXPECT_LE((c.point - v2(0.0, 2.0)).norm(), 1e-12);
  EXPECT_NEAR(c.local_time, 1.0, 1e-12);
  EXPECT_LE((c.reflection - v2(1.0, 0.0)).norm(), 1e-12);
}

TEST(LcpStep, ObliqueMatchesEnumeration) {
  const Polyhedron q{Mat::Identity(2, 2), Vec::Zero(2)};
  const Mat r = m2(1.0, -0.4, -0.3, 1.0);
  std::mt19937_64 gen(5);
  std::normal_distribution<double> g;
  for (int i = 0; i < 500; ++i) {
    const Vec y = v2(g(gen), g(gen));
    const StepCorrection c = skorokhod_step_polyhedron(q, r, y);
    const Vec x = lcp_by_enumeration(r, y);
    EXPECT_LE((c.face_local_time - x).norm(), 1e-9) << y.transpose();
    EXPECT_LE((c.point - (y + r * x)).norm(), 1e-9);
    EXPECT_NEAR(c.local_time, x.sum(), 1e-9);
  }
}

TEST(SmoothStep, BallNormalReflection) {
  const Domain b = Domain::ball(v2(0, 0), 1.0);
  const StepCorrection c = oblique_correction_smooth(b, ReflectionField::normal(), v2(3.0, 4.0));
  EXPECT_LE((c.point - v2(0.6, 0.8)).norm(), 1e-12);
  EXPECT_NEAR(c.local_time, 4.0, 1e-12);
}

TEST(SmoothStep, HalfSpaceObliqueRay) {
  // r = (1, 1) normalised so r . n = 1 with n = (0, 1); from y = (0, -2) the
  // ray y + t r meets x_2 = 0 at t = 2.
  const Domain h = Domain::half_space(v2(0, 1), 0.0);
  const StepCorrection c = oblique_correction_smooth(h, ReflectionField::constant(v2(1, 1)), v2(0.0, -2.0));
  EXPECT_LE((c.point - v2(2.0, 0.0)).norm(), 1e-12);
  EXPECT_NEAR(c.local_time, 2.0, 1e-12);
}

TEST(SmoothStep, InteriorIsIdentity) {
  const Domain b = Domain::ball(v2(0, 0), 1.0);
  const StepCorrection c = oblique_correction_smooth(b, ReflectionField::normal(), v2(0.1, 0.2));
  EXPECT_EQ(c.local_time, 0.0);
  EXPECT_EQ(c.point, v2(0.1, 0.2));
}

TEST(SkorokhodMap1d, RunningMinimum) {
  const std::vector<double> y{0.0, -0.5, 0.2, -1.0, 0.5};
  const auto [z, l] = skorokhod_map_1d(y);
  const std::vector<double> lz{0.0, 0.0, 0.7, 0.0, 1.5};
  const std::vector<double> ll{0.0, 0.5, 0.5, 1.0, 1.0};
  for (std::size_t k = 0; k < y.size(); ++k) {
    EXPECT_NEAR(z[k], lz[k], 1e-15);
    EXPECT_NEAR(l[k], ll[k], 1e-15);
  }
}

TEST(Path, ReproducibleAndConsistent) {
  const Domain q = Domain::orthant(2);
  DiffusionSpec s = brownian_spec(v2(0.5, 0.5));
  s.reflection = ReflectionField::matrix(m2(1.0, -0.2, -0.3, 1.0));
  SimulationOptions o;
  o.dt = 0.01;
  const PathSample a = simulate_path(q, s, o, 77);
  const PathSample b = simulate_path(q, s, o, 77);
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.local_time, b.local_time);
  ASSERT_EQ(a.size(), 101u);
  EXPECT_DOUBLE_EQ(a.times.back(), 1.0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_GE(signed_distance(q, a.state_vec(k)), -1e-12);
    if (k > 0) {
      EXPECT_GE(a.local_time[k], a.local_time[k - 1]);
    }
  }
  EXPECT_LT(a.max_residual, 1e-10);
}

TEST(Path, FarFromBoundaryEqualsUnreflected) {
  const Domain big = Domain::ball(v2(0, 0), 100.0);
  const DiffusionSpec s = brownian_spec(v2(0, 0));
  SimulationOptions o;
  const PathSample a = simulate_path(big, s, o, 3);
  const PathSample b = simulate_unreflected_path(s, o, 3);
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.local_time.back(), 0.0);
}

TEST(Path, ContractionViolationIsRejected) {
  DiffusionSpec s = brownian_spec(v2(1, 1));
  s.reflection = ReflectionField::matrix(m2(1.0, -2.0, -2.0, 1.0));
  EXPECT_EQ(code_of([&] { simulate_path(Domain::orthant(2), s, SimulationOptions{}, 1); }),
            ErrorCode::kContractionViolated);
}

TEST(Path, NotchedDomainIsUnsupported) {
  const DiffusionSpec s = brownian_spec(v2(-1, 1));
  EXPECT_EQ(code_of([&] { simulate_path(Domain::notched_half_plane(0.25, 0.5, 1.0), s, SimulationOptions{}, 1); }),
            ErrorCode::kUnsupported);
}

TEST(Path, StartOnCornerStopsImmediately) {
  const PathSample p = simulate_path(Domain::orthant(2), brownian_spec(v2(0, 0)), SimulationOptions{}, 1);
  ASSERT_TRUE(p.stopped());
  EXPECT_EQ(*p.tau_v, 0u);
}

TEST(Ensemble, IndependentOfThreadCount) {
  const Domain q = Domain::orthant(2);
  const DiffusionSpec s = brownian_spec(v2(0.3, 0.6));
  SimulationOptions o;
  o.dt = 0.01;
  const auto a = simulate_ensemble(q, s, o, 40, 99, 1);
  const auto b = simulate_ensemble(q, s, o, 40, 99, 4);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].states, b[i].states);
    EXPECT_EQ(a[i].seed, ensemble_path_seed(99, i));
  }
  EXPECT_NE(a[0].states, a[1].states);
}

TEST(Options, Validation) {
  SimulationOptions o;
  o.dt = 0.0;
  EXPECT_NE(code_of([&] { o.validate(); }), ErrorCode::kOk);
  o.dt = 0.3;
  EXPECT_EQ(o.steps(), 4u);
}

}  // namespace
}  // namespace reflectolab
