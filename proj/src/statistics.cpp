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

#include "reflectolab/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "reflectolab/rng.hpp"

namespace reflectolab {
namespace {

void require_nonempty(std::size_t n, const char* what) {
  if (n == 0) fail(ErrorCode::kInvalidArgument, std::string(what) + " is empty");
}

std::vector<Eigen::Index> thin(Eigen::Index rows, std::size_t cap) {
  std::vector<Eigen::Index> idx;
  const auto n = static_cast<std::size_t>(rows);
  const std::size_t k = std::min(n, cap);
  idx.reserve(k);
  for (std::size_t i = 0; i < k; ++i) idx.push_back(static_cast<Eigen::Index>(i * n / k));
  return idx;
}

Mat take_rows(const Mat& m, const std::vector<Eigen::Index>& idx) {
  Mat out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(idx[i]);
  return out;
}

NullDistribution summarize(std::vector<double> values, double level) {
  NullDistribution out;
  out.mean = values.empty() ? 0.0
                            : std::accumulate(values.begin(), values.end(), 0.0) /
                                  static_cast<double>(values.size());
  out.quantile = values.empty() ? 0.0 : empirical_quantile(values, level);
  out.values = std::move(values);
  return out;
}

}  // namespace

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a.size(), "first sample");
  require_nonempty(b.size(), "second sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double ks_one_sample(std::span<const double> a, const std::function<double(double)>& cdf) {
  require_nonempty(a.size(), "sample");
  std::vector<double> x(a.begin(), a.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_critical_value(double alpha, std::size_t n, std::size_t m) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1)");
  require_nonempty(n, "first sample");
  require_nonempty(m, "second sample");
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return c * std::sqrt((dn + dm) / (dn * dm));
}

double energy_distance(const Mat& a, const Mat& b, std::size_t cap) {
  if (a.cols() != b.cols()) fail(ErrorCode::kDimensionMismatch, "samples differ in dimension");
  require_nonempty(static_cast<std::size_t>(a.rows()), "first sample");
  require_nonempty(static_cast<std::size_t>(b.rows()), "second sample");
  const Mat x = take_rows(a, thin(a.rows(), cap));
  const Mat y = take_rows(b, thin(b.rows(), cap));
  auto mean_dist = [](const Mat& p, const Mat& q) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      for (Eigen::Index j = 0; j < q.rows(); ++j) s += (p.row(i) - q.row(j)).norm();
    }
    return s / (static_cast<double>(p.rows()) * static_cast<double>(q.rows()));
  };
  return std::max(0.0, 2.0 * mean_dist(x, y) - mean_dist(x, x) - mean_dist(y, y));
}

double two_sample_distance(const Mat& a, const Mat& b, DistanceKind kind, std::size_t energy_cap) {
  if (a.cols() != b.cols()) fail(ErrorCode::kDimensionMismatch, "samples differ in dimension");
  if (kind == DistanceKind::kEnergy) return energy_distance(a, b, energy_cap);
  double d = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    const Vec ca = a.col(c);
    const Vec cb = b.col(c);
    d = std::max(d, ks_two_sample({ca.data(), static_cast<std::size_t>(ca.size())},
                                  {cb.data(), static_cast<std::size_t>(cb.size())}));
  }
  return d;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed, std::uint64_t round) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  const CounterRng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const double u = rng.uniform(round, 0, static_cast<std::uint32_t>(i));
    const auto j = std::min(static_cast<std::size_t>(u * static_cast<double>(i)), i - 1);
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

double empirical_quantile(std::vector<double> values, double level) {
  require_nonempty(values.size(), "quantile input");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(level, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

NullDistribution permutation_null(const Mat& a, const Mat& b, int splits, double quantile_level,
                                  std::uint64_t seed,
                                  const std::function<double(const Mat&, const Mat&)>& statistic) {
  if (a.cols() != b.cols()) fail(ErrorCode::kDimensionMismatch, "samples differ in dimension");
  if (splits < 1) fail(ErrorCode::kInvalidArgument, "need at least one split");
  Mat pooled(a.rows() + b.rows(), a.cols());
  pooled << a, b;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(splits));
  Mat x(a.rows(), a.cols());
  Mat y(b.rows(), b.cols());
  for (int s = 0; s < splits; ++s) {
    const auto p = seeded_permutation(static_cast<std::size_t>(pooled.rows()), seed,
                                      static_cast<std::uint64_t>(s));
    for (Eigen::Index i = 0; i < x.rows(); ++i) x.row(i) = pooled.row(static_cast<Eigen::Index>(p[static_cast<std::size_t>(i)]));
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      y.row(i) = pooled.row(static_cast<Eigen::Index>(p[static_cast<std::size_t>(x.rows() + i)]));
    }
    values.push_back(statistic(x, y));
  }
  return summarize(std::move(values), quantile_level);
}

NullDistribution permutation_null_energy(const Mat& a, const Mat& b, int splits,
                                         double quantile_level, std::uint64_t seed,
                                         std::size_t cap) {
  if (a.cols() != b.cols()) fail(ErrorCode::kDimensionMismatch, "samples differ in dimension");
  if (splits < 1) fail(ErrorCode::kInvalidArgument, "need at least one split");
  const Mat x = take_rows(a, thin(a.rows(), cap));
  const Mat y = take_rows(b, thin(b.rows(), cap));
  const Eigen::Index nx = x.rows();
  const Eigen::Index n = nx + y.rows();
  Mat pooled(n, x.cols());
  pooled << x, y;
  Mat dist(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      dist(i, j) = dist(j, i) = (pooled.row(i) - pooled.row(j)).norm();
    }
  }
  // With group labels g, sum_xy = (total - sum_xx - sum_yy) / 2.
  const double total = dist.sum();
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(splits));
  std::vector<char> in_x(static_cast<std::size_t>(n));
  for (int s = 0; s < splits; ++s) {
    const auto p = seeded_permutation(static_cast<std::size_t>(n), seed, static_cast<std::uint64_t>(s));
    std::fill(in_x.begin(), in_x.end(), 0);
    for (Eigen::Index i = 0; i < nx; ++i) in_x[p[static_cast<std::size_t>(i)]] = 1;
    double sxx = 0.0;
    double syy = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const char gi = in_x[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < n; ++j) {
        if (gi != in_x[static_cast<std::size_t>(j)]) continue;
        (gi ? sxx : syy) += dist(i, j);
      }
    }
    const double sxy = 0.5 * (total - sxx - syy);
    const double mx = static_cast<double>(nx);
    const double my = static_cast<double>(n - nx);
    values.push_back(std::max(0.0, 2.0 * sxy / (mx * my) - sxx / (mx * mx) - syy / (my * my)));
  }
  return summarize(std::move(values), quantile_level);
}

}  // namespace reflectolab
