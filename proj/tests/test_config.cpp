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

#include <fstream>
#include <sstream>

#include "reflectolab/config.hpp"
#include "reflectolab/error.hpp"

namespace reflectolab {
namespace {

std::string fixture(const std::string& name) {
  std::ifstream f(std::string(REFLECTOLAB_CONFIG_DIR) + "/" + name);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

ConfigError parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a configuration error";
  return ConfigError(ErrorCode::kOk, "", 0, 0, "");
}

TEST(Config, OrthantFixture) {
  const RunConfigFile c = parse_config(fixture("orthant_srbm_2d.yaml"));
  ASSERT_TRUE(c.domain && c.diffusion);
  EXPECT_TRUE(c.domain->is_orthant());
  EXPECT_EQ(c.diffusion->reflection.kind(), ReflectionField::Kind::kMatrix);
  EXPECT_EQ(c.diffusion->reflection.columns(), Mat::Identity(2, 2));
  EXPECT_EQ(c.diffusion->covariance.constant_value(), Mat::Identity(2, 2));
  EXPECT_EQ(c.command, "simulate");
  EXPECT_EQ(c.paths, 1000u);
}

TEST(Config, NonPdCovarianceNamesKey) {
  const ConfigError e = parse_error(fixture("nonpd_covariance.yaml"));
  EXPECT_EQ(e.code(), ErrorCode::kValidationError);
  EXPECT_EQ(e.key_path(), "diffusion.covariance");
  EXPECT_NE(std::string(e.what()).find("positive definite"), std::string::npos);
  EXPECT_EQ(e.line(), 9);
}

TEST(Config, LadderFixture) {
  const RunConfigFile c = parse_config(fixture("polyhedral_ladder.yaml"));
  ASSERT_TRUE(c.experiment.has_value());
  const ExperimentSpec& s = *c.experiment;
  EXPECT_EQ(s.theorem, Theorem::kPolyhedral);
  EXPECT_EQ(s.indices, (std::vector<int>{1, 2, 4, 8, 16}));
  EXPECT_EQ(s.seed, 32u);
  const Domain d4 = s.domains.at(4);
  const Polyhedron* p4 = d4.as_polyhedron();
  ASSERT_NE(p4, nullptr);
  EXPECT_DOUBLE_EQ(p4->offsets(0), 0.25);
  EXPECT_DOUBLE_EQ(s.problem(4).start(0), 1.25);
  EXPECT_DOUBLE_EQ(s.problem(0).start(0), 1.0);
}

TEST(Config, ReflectionLadderPerturbsColumns) {
  const RunConfigFile c = parse_config(fixture("reflection_ladder.yaml"));
  const Mat r4 = c.experiment->problem(4).reflection.columns();
  EXPECT_DOUBLE_EQ(r4(0, 1), -0.125);
  EXPECT_DOUBLE_EQ(r4(1, 0), -0.125);
  EXPECT_DOUBLE_EQ(r4(0, 0), 1.0);
}

TEST(Config, ConformanceFileUsesWholeGrammar) {
  const RunConfigFile c = parse_config(fixture("conformance.yaml"));
  EXPECT_EQ(c.seed, 18446744073709551615ull);
  EXPECT_EQ(c.threads, 2u);
  EXPECT_TRUE(c.geometry.has_value());
  ASSERT_TRUE(c.convergence.has_value());
  EXPECT_EQ(c.convergence->metrics.size(), 6u);
  ASSERT_TRUE(c.experiment.has_value());
  EXPECT_EQ(c.experiment->coupling, Coupling::kIndependent);
  EXPECT_EQ(c.experiment->energy_cap, 500u);
  EXPECT_DOUBLE_EQ(c.simulation.dt, 0.01);
}

TEST(Config, EveryFixtureParsesOrFailsCleanly) {
  for (const char* name : {"geometry_orthant.yaml", "hitting_orthant.yaml", "slit_convergence.yaml",
                           "expanding_balls.yaml"}) {
    EXPECT_NO_THROW(parse_config(fixture(name))) << name;
  }
}

TEST(Config, SyntaxErrorHasPosition) {
  const ConfigError e = parse_error("command: simulate\ndomain: {kind: orthant\n");
  EXPECT_EQ(e.code(), ErrorCode::kParseError);
  EXPECT_GT(e.line(), 0);
  EXPECT_GT(e.column(), 0);
}

TEST(Config, UnknownKeyIsRejected) {
  const ConfigError e = parse_error("domain:\n  kind: orthant\n  dim: 2\n  colour: red\n");
  EXPECT_EQ(e.code(), ErrorCode::kValidationError);
  EXPECT_EQ(e.key_path(), "domain.colour");
  EXPECT_EQ(e.line(), 4);
}

TEST(Config, NonUnitNormalIsRejected) {
  const ConfigError e =
      parse_error("domain:\n  kind: polyhedron\n  normals: [[2.0, 0.0]]\n  offsets: [0.0]\n");
  EXPECT_EQ(e.key_path(), "domain");
  EXPECT_NE(std::string(e.what()).find("InvalidDomain"), std::string::npos);
}

TEST(Config, StartOutsideDomainIsRejected) {
  const ConfigError e = parse_error("domain: {kind: orthant, dim: 2}\ndiffusion:\n  start: [-1.0, 1.0]\n");
  EXPECT_EQ(e.key_path(), "diffusion");
}

TEST(Config, WrongTypesAreRejected) {
  EXPECT_EQ(parse_error("seed: -3\n").key_path(), "seed");
  EXPECT_EQ(parse_error("simulation: {dt: fast}\n").key_path(), "simulation.dt");
  EXPECT_EQ(parse_error("domain: {kind: orthant, dim: 2}\ndiffusion: {start: [1.0]}\n").key_path(),
            "diffusion.start");
  EXPECT_EQ(parse_error("command: explode\n").key_path(), "command");
}

TEST(Config, ExperimentStartMustStayInDomain) {
  const std::string text =
      "experiment:\n  theorem: polyhedral\n  family:\n    kind: shifted_polyhedron\n"
      "    base: {kind: orthant, dim: 2}\n    shift: [1.0, 1.0]\n"
      "  diffusion: {start: [0.5, 0.5]}\n  indices: [1, 2]\n";
  const ConfigError e = parse_error(text);
  EXPECT_NE(e.key_path().find("index 1"), std::string::npos);
}

TEST(Fnv, ReferenceValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ull);
}

}  // namespace
}  // namespace reflectolab
