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

// Two-sample distances for Monte Carlo comparison of path functionals.
// Samples are matrices with one row per draw.

#ifndef REFLECTOLAB_STATISTICS_HPP_
#define REFLECTOLAB_STATISTICS_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "reflectolab/linalg.hpp"

namespace reflectolab {

enum class DistanceKind { kKsPerCoordinate, kEnergy };

// Classical two-sample Kolmogorov-Smirnov statistic sup |F_a - G_b|.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

// sup |F_n - F| for a continuous reference CDF.
double ks_one_sample(std::span<const double> a, const std::function<double(double)>& cdf);

// Asymptotic critical value c(alpha) sqrt((n + m) / (n m)) with
// c(alpha) = sqrt(-ln(alpha / 2) / 2).
double ks_critical_value(double alpha, std::size_t n, std::size_t m);

inline constexpr std::size_t kEnergySubsample = 1000;

// Energy distance 2 E|X - Y| - E|X - X'| - E|Y - Y'| in V-statistic form.
// Samples longer than `cap` are thinned to `cap` evenly spaced rows.
double energy_distance(const Mat& a, const Mat& b, std::size_t cap = kEnergySubsample);

// KS: max over columns. Energy: as above. Throws kDimensionMismatch and
// kInvalidArgument on empty input.
double two_sample_distance(const Mat& a, const Mat& b, DistanceKind kind,
                           std::size_t energy_cap = kEnergySubsample);

struct NullDistribution {
  std::vector<double> values;  // one per split
  double mean = 0.0;
  double quantile = 0.0;
};

// Permutation null of `statistic` on the pooled rows of a and b: `splits`
// random re-partitions into groups of the original sizes, seeded
// deterministically.
NullDistribution permutation_null(const Mat& a, const Mat& b, int splits, double quantile_level,
                                  std::uint64_t seed,
                                  const std::function<double(const Mat&, const Mat&)>& statistic);

// Same for the energy distance, reusing one pooled distance matrix.
NullDistribution permutation_null_energy(const Mat& a, const Mat& b, int splits,
                                         double quantile_level, std::uint64_t seed,
                                         std::size_t cap = kEnergySubsample);

// Deterministic Fisher-Yates shuffle of 0..n-1 driven by the counter RNG.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed, std::uint64_t round);

// Empirical quantile with linear interpolation.
double empirical_quantile(std::vector<double> values, double level);

}  // namespace reflectolab

#endif  // REFLECTOLAB_STATISTICS_HPP_
