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

#include "reflectolab/error.hpp"
#include "reflectolab/harness.hpp"

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

PathSample line_path(double slope, std::size_t steps, double dt) {
  PathSample p;
  p.dim = 1;
  p.dt = dt;
  for (std::size_t k = 0; k <= steps; ++k) {
    p.times.push_back(static_cast<double>(k) * dt);
    p.states.push_back(slope * static_cast<double>(k) * dt);
    p.local_time.push_back(0.0);
    p.reflection.push_back(0.0);
  }
  return p;
}

TEST(Functionals, ModulusOfLinearPath) {
  const PathSample p = line_path(3.0, 100, 0.01);
  EXPECT_NEAR(modulus_of_continuity(p, 0.05), 0.15, 1e-12);
  const PathFunctionals f = path_functionals(p, 0.05);
  EXPECT_NEAR(f.sup_norm, 3.0, 1e-12);
  EXPECT_NEAR(f.terminal(0), 3.0, 1e-12);
  EXPECT_FALSE(f.stopped);
}

ExperimentSpec small_orthant_spec(const Mat& covariance) {
  ExperimentSpec spec;
  spec.name = "small";
  spec.theorem = Theorem::kPolyhedral;
  spec.domains = sequences::constant(Domain::orthant(2));
  spec.problem = [covariance](int n) {
    DiffusionSpec s = brownian_spec(v2(1.0, 1.0));
    s.covariance = CovarianceField::constant(covariance);
    const double e = n == 0 ? 0.0 : -0.5 / n;
    s.reflection = ReflectionField::matrix(m2(1.0, e, e, 1.0));
    return s;
  };
  spec.indices = {1, 4};
  spec.simulation.dt = 0.01;
  spec.paths = 400;
  spec.seed = 5;
  spec.band_splits = 20;
  spec.probes = ProbeSet::box_grid(v2(0, 0), v2(2, 2), 0.25);
  return spec;
}

TEST(Experiment, ReportIsDeterministicAcrossThreadCounts) {
  ExperimentSpec spec = small_orthant_spec(Mat::Identity(2, 2));
  spec.threads = 1;
  const std::string a = report_to_json(run_experiment(spec));
  spec.threads = 3;
  const std::string b = report_to_json(run_experiment(spec));
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("\"verdict\""), std::string::npos);
}

TEST(Experiment, SampleSinkSeesEveryEnsemble) {
  const ExperimentSpec spec = small_orthant_spec(Mat::Identity(2, 2));
  std::vector<int> seen;
  run_experiment(spec, [&](int n, const FunctionalSamples& s) {
    seen.push_back(n);
    EXPECT_EQ(s.path_ids.size(), s.kept());
  });
  EXPECT_EQ(seen, (std::vector<int>{0, 1, 4}));
}

TEST(Experiment, HittingConditionGatesTheRun) {
  const ExperimentSpec spec = small_orthant_spec(m2(1.0, 0.5, 0.5, 1.0));
  EXPECT_EQ(code_of([&] { run_experiment(spec); }), ErrorCode::kHittingConditionFailed);
  ExperimentSpec over = spec;
  over.unsound_override = true;
  const ConvergenceReport r = run_experiment(over);
  EXPECT_TRUE(r.unsound);
  ASSERT_TRUE(r.hitting.has_value());
  EXPECT_FALSE(r.hitting->avoids_corners);
}

TEST(Experiment, NonShrinkingDiagnosticRefuses) {
  ExperimentSpec spec;
  spec.theorem = Theorem::kDomainSequence;
  spec.domains = sequences::slit();
  spec.problem = [](int) { return brownian_spec(v2(-1.0, 1.0)); };
  spec.indices = {1, 2, 4};
  spec.probes = ProbeSet::points_only({v2(0.0, 1.0), v2(-1.0, 1.0)});
  spec.paths = 10;
  try {
    run_experiment(spec);
    FAIL() << "expected a refusal";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kHypothesisDiagnosticsFailed);
    EXPECT_NE(std::string(e.what()).find("weak_gap"), std::string::npos);
  }
}

TEST(Diagnostics, PolyhedralLadderShrinks) {
  const ExperimentSpec spec = small_orthant_spec(Mat::Identity(2, 2));
  const auto diags = hypothesis_diagnostics(spec);
  bool found = false;
  for (const auto& d : diags) {
    EXPECT_TRUE(d.shrinking) << d.name;
    if (d.name == "reflection_column_gap") {
      found = true;
      ASSERT_EQ(d.values.size(), 2u);
      EXPECT_NEAR(d.values[0], 0.5, 1e-12);
      EXPECT_NEAR(d.values[1], 0.125, 1e-12);
    }
  }
  EXPECT_TRUE(found);
}

TEST(Spec, ValidateNamesTheKey) {
  ExperimentSpec spec = small_orthant_spec(Mat::Identity(2, 2));
  spec.indices = {4, 1};
  try {
    spec.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kValidationError);
    EXPECT_NE(std::string(e.what()).find("indices"), std::string::npos);
  }
}

}  // namespace
}  // namespace reflectolab
