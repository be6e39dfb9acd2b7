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

// Coefficient fields of a reflected diffusion and the corner-avoidance test
// for semimartingale reflected Brownian motion in the orthant.

#ifndef REFLECTOLAB_DIFFUSION_HPP_
#define REFLECTOLAB_DIFFUSION_HPP_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "reflectolab/geometry.hpp"

namespace reflectolab {

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kEigenvalueFloor = 1e-12;
inline constexpr double kInwardTolerance = 1e-10;

// Symmetric positive-definite square root by spectral decomposition.
// Throws kNotSymmetric / kNotPD.
Mat psd_sqrt(const Mat& a);

// Checks symmetry and positive definiteness; `what` names the offending
// field in the error message.
void validate_covariance(const Mat& a, const std::string& what = "covariance");

// r / (r . n). Throws kNotInwardPointing when r . n <= 1e-10.
Vec normalize_reflection(const Vec& r, const Vec& n);

// Largest eigenvalue modulus.
double spectral_radius(const Mat& m);

struct HittingViolation {
  int i = 0;  // 1-based
  int j = 0;
  double lhs = 0.0;  // r_ij a_jj + r_ji a_ii
  double rhs = 0.0;  // 2 a_ij
};

struct HittingCheck {
  bool avoids_corners = true;
  double spectral_radius = 0.0;  // of I - R
  std::vector<HittingViolation> violations;
};

// Corner-avoidance criterion for SRBM in the orthant:
//   r_ij a_jj + r_ji a_ii >= 2 a_ij  for all i, j,
// valid when r_ii = 1, r_ij <= 0 (i != j) and rho(I - R) < 1. A structural
// failure throws kHypothesesNotMet naming the failed check.
HittingCheck check_hitting_condition(const Mat& r, const Mat& a);

// Same, but reports kUnsupported unless `domain` is the standard orthant.
HittingCheck check_hitting_condition(const Domain& domain, const Mat& r, const Mat& a);

class DriftField {
 public:
  using Fn = std::function<Vec(const Vec&)>;

  static DriftField zero(int dim);
  static DriftField constant(Vec value);
  // g(x) = offset + linear * x
  static DriftField affine(Vec offset, Mat linear);
  static DriftField custom(int dim, Fn fn);

  int dim() const noexcept { return dim_; }
  bool is_constant() const noexcept { return kind_ == Kind::kConstant; }
  bool is_custom() const noexcept { return kind_ == Kind::kCustom; }
  const Vec& offset() const noexcept { return offset_; }
  const Mat& linear() const noexcept { return linear_; }

  Vec operator()(const Vec& x) const;
  void evaluate(const Vec& x, Vec& out) const;

 private:
  enum class Kind { kConstant, kAffine, kCustom };
  int dim_ = 0;
  Kind kind_ = Kind::kConstant;
  Vec offset_;
  Mat linear_;
  Fn fn_;
};

class CovarianceField {
 public:
  using Fn = std::function<Mat(const Vec&)>;

  static CovarianceField identity(int dim);
  static CovarianceField constant(Mat value);
  static CovarianceField custom(int dim, Fn fn);

  int dim() const noexcept { return dim_; }
  bool is_constant() const noexcept { return !fn_; }
  const Mat& constant_value() const noexcept { return value_; }
  const Mat& constant_sqrt() const noexcept { return sqrt_; }
  // Spectral norm of the constant value.
  double constant_norm() const noexcept { return norm_; }

  Mat operator()(const Vec& x) const;
  Mat sqrt_at(const Vec& x) const;

 private:
  int dim_ = 0;
  Mat value_;
  Mat sqrt_;
  double norm_ = 0.0;
  Fn fn_;
};

class ReflectionField {
 public:
  enum class Kind { kNormal, kConstant, kMatrix, kRotated, kCustom };
  using Fn = std::function<Vec(const BoundaryPoint&)>;

  static ReflectionField normal();
  // A fixed direction, rescaled so r . n = 1 at every boundary point.
  static ReflectionField constant(Vec direction);
  // Column i is the reflection direction on face i (1-based face index).
  static ReflectionField matrix(Mat columns);
  // Planar: r = n + tan(angle) * J n, with J the quarter turn.
  static ReflectionField rotated(double angle);
  static ReflectionField custom(Fn fn);

  Kind kind() const noexcept { return kind_; }
  const Mat& columns() const noexcept { return columns_; }
  const Vec& direction() const noexcept { return direction_; }
  double angle() const noexcept { return angle_; }

  // Normalised direction (r . n = 1) at a boundary point.
  Vec at(const BoundaryPoint& z) const;

  // d x m matrix of normalised per-face directions for a polyhedron.
  Mat polyhedron_matrix(const Polyhedron& p) const;

 private:
  Kind kind_ = Kind::kNormal;
  Mat columns_;
  Vec direction_;
  double angle_ = 0.0;
  Fn fn_;
};

struct DiffusionSpec {
  DriftField drift;
  CovarianceField covariance;
  ReflectionField reflection;
  Vec start;

  // Dimension agreement, start point in the closure, and the reflection
  // condition on polyhedral faces. Throws kInvalidArgument or the specific
  // field error.
  void validate(const Domain& domain) const;
};

// Standard Brownian motion (g = 0, A = I) with normal reflection.
DiffusionSpec brownian_spec(Vec start);

}  // namespace reflectolab

#endif  // REFLECTOLAB_DIFFUSION_HPP_
