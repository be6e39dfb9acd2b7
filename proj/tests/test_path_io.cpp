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

#include <clocale>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "reflectolab/error.hpp"
#include "reflectolab/path_io.hpp"

namespace reflectolab {
namespace {

std::vector<PathSample> some_paths() {
  DiffusionSpec s = brownian_spec((Vec(2) << 0.2, 0.1).finished());
  SimulationOptions o;
  o.dt = 0.02;
  auto paths = simulate_ensemble(Domain::orthant(2), s, o, 5, 8, 1);
  paths[2].tau_v = 17;
  return paths;
}

TEST(FormatDouble, SeventeenDigitsRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(0.0), "0");
  EXPECT_EQ(format_double(-2.5), "-2.5");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(gen) * std::pow(10.0, static_cast<int>(gen() % 40) - 20);
    EXPECT_EQ(parse_double(format_double(x)), x);
  }
  EXPECT_THROW(parse_double("1,5"), Error);
}

TEST(FormatDouble, IgnoresLocale) {
  const char* old = std::setlocale(LC_NUMERIC, "de_DE.UTF-8");
  EXPECT_EQ(format_double(1.5), "1.5");
  if (old) std::setlocale(LC_NUMERIC, "C");
}

TEST(PathsCsv, RoundTripIsLossless) {
  const auto paths = some_paths();
  std::stringstream s;
  write_paths_csv(s, paths);
  std::string header;
  std::getline(s, header);
  EXPECT_EQ(header, "path_id,t,Z_1,Z_2,l,L_1,L_2,stopped_flag");
  s.seekg(0);
  const auto back = read_paths_csv(s, 0.02);
  ASSERT_EQ(back.size(), paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    EXPECT_EQ(back[i].times, paths[i].times);
    EXPECT_EQ(back[i].states, paths[i].states);
    EXPECT_EQ(back[i].local_time, paths[i].local_time);
    EXPECT_EQ(back[i].reflection, paths[i].reflection);
    EXPECT_EQ(back[i].tau_v, paths[i].tau_v);
  }
}

TEST(PathFrames, RoundTripIsLossless) {
  const auto paths = some_paths();
  std::stringstream s(std::ios::in | std::ios::out | std::ios::binary);
  for (const auto& p : paths) write_path_frame(s, p);
  const auto back = read_path_frames(s);
  ASSERT_EQ(back.size(), paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    EXPECT_EQ(back[i].seed, paths[i].seed);
    EXPECT_EQ(back[i].dim, paths[i].dim);
    EXPECT_EQ(back[i].faces, paths[i].faces);
    EXPECT_EQ(back[i].states, paths[i].states);
    EXPECT_EQ(back[i].face_local_time, paths[i].face_local_time);
    EXPECT_EQ(back[i].tau_v, paths[i].tau_v);
    EXPECT_EQ(back[i].correction_events, paths[i].correction_events);
    EXPECT_EQ(back[i].max_residual, paths[i].max_residual);
  }
}

TEST(PathFrames, RejectsCorruptInput) {
  const auto paths = some_paths();
  std::stringstream s(std::ios::in | std::ios::out | std::ios::binary);
  write_path_frame(s, paths[0]);
  const std::string bytes = s.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  PathSample p;
  EXPECT_THROW(read_path_frame(truncated, p), Error);
  std::string bad = bytes;
  bad[0] = 'X';
  std::stringstream wrong(bad);
  EXPECT_THROW(read_path_frame(wrong, p), Error);
}

}  // namespace
}  // namespace reflectolab
