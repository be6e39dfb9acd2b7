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

#include "reflectolab/diffusion.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace reflectolab {
namespace {

void require_square(const Mat& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    fail(ErrorCode::kDimensionMismatch, std::string(what) + " must be a non-empty square matrix");
  }
}

void check_symmetric(const Mat& a, const std::string& what) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    fail(ErrorCode::kNotSymmetric, what + " is not symmetric");
  }
}

}  // namespace

Mat psd_sqrt(const Mat& a) {
  require_square(a, "covariance");
  if (!a.allFinite()) fail(ErrorCode::kNotPD, "covariance has non-finite entries");
  check_symmetric(a, "covariance");
  const Mat sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
  if (eig.info() != Eigen::Success) fail(ErrorCode::kNotPD, "eigen decomposition failed");
  const Vec& lambda = eig.eigenvalues();
  if (lambda.minCoeff() <= kEigenvalueFloor) {
    std::ostringstream msg;
    msg << "covariance is not positive definite (min eigenvalue " << lambda.minCoeff() << ")";
    fail(ErrorCode::kNotPD, msg.str());
  }
  const Mat& v = eig.eigenvectors();
  Mat root = v * lambda.cwiseSqrt().asDiagonal() * v.transpose();
  return 0.5 * (root + root.transpose());
}

void validate_covariance(const Mat& a, const std::string& what) {
  try {
    (void)psd_sqrt(a);
  } catch (const Error& e) {
    fail(e.code(), what + ": " + e.what());
  }
}

Vec normalize_reflection(const Vec& r, const Vec& n) {
  if (r.size() != n.size()) fail(ErrorCode::kDimensionMismatch, "reflection and normal differ in dimension");
  const double rn = r.dot(n);
  if (!(rn > kInwardTolerance)) {
    std::ostringstream msg;
    msg << "reflection vector is not inward pointing (r.n = " << rn << ")";
    fail(ErrorCode::kNotInwardPointing, msg.str());
  }
  return r / rn;
}

double spectral_radius(const Mat& m) {
  require_square(m, "spectral_radius argument");
  if (m.isZero(0.0)) return 0.0;
  Eigen::EigenSolver<Mat> eig(m, /*computeEigenvectors=*/false);
  if (eig.info() != Eigen::Success) {
    fail(ErrorCode::kSolverDiverged, "eigenvalue iteration did not converge");
  }
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

HittingCheck check_hitting_condition(const Mat& r, const Mat& a) {
  require_square(r, "reflection matrix");
  require_square(a, "covariance");
  if (r.rows() != a.rows()) {
    fail(ErrorCode::kDimensionMismatch, "reflection matrix and covariance differ in dimension");
  }
  validate_covariance(a);
  const Eigen::Index d = r.rows();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (std::abs(r(i, i) - 1.0) > 1e-12) {
      fail(ErrorCode::kHypothesesNotMet,
           "unit diagonal: r_" + std::to_string(i + 1) + std::to_string(i + 1) + " != 1");
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i != j && r(i, j) > 0.0) {
        fail(ErrorCode::kHypothesesNotMet,
             "non-positive off-diagonal: r_" + std::to_string(i + 1) + std::to_string(j + 1) +
                 " > 0");
      }
    }
  }
  HittingCheck out;
  out.spectral_radius = spectral_radius(Mat::Identity(d, d) - r);
  if (!(out.spectral_radius < 1.0)) {
    std::ostringstream msg;
    msg << "spectral radius of I - R is " << out.spectral_radius << " (must be < 1)";
    fail(ErrorCode::kHypothesesNotMet, msg.str());
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const double lhs = r(i, j) * a(j, j) + r(j, i) * a(i, i);
      const double rhs = 2.0 * a(i, j);
      if (lhs < rhs - 1e-12) {
        out.avoids_corners = false;
        out.violations.push_back({static_cast<int>(i) + 1, static_cast<int>(j) + 1, lhs, rhs});
      }
    }
  }
  return out;
}

HittingCheck check_hitting_condition(const Domain& domain, const Mat& r, const Mat& a) {
  if (!domain.is_orthant()) {
    fail(ErrorCode::kUnsupported, "the corner-avoidance criterion is implemented for the orthant only");
  }
  if (r.rows() != domain.dim()) fail(ErrorCode::kDimensionMismatch, "reflection matrix does not match the orthant");
  return check_hitting_condition(r, a);
}

// --- DriftField ---

DriftField DriftField::zero(int dim) { return constant(Vec::Zero(dim)); }

DriftField DriftField::constant(Vec value) {
  if (!value.allFinite()) fail(ErrorCode::kInvalidArgument, "drift must be finite");
  DriftField f;
  f.dim_ = static_cast<int>(value.size());
  f.kind_ = Kind::kConstant;
  f.offset_ = std::move(value);
  return f;
}

DriftField DriftField::affine(Vec offset, Mat linear) {
  if (linear.rows() != offset.size() || linear.cols() != offset.size()) {
    fail(ErrorCode::kDimensionMismatch, "affine drift matrix does not match the offset");
  }
  if (!offset.allFinite() || !linear.allFinite()) fail(ErrorCode::kInvalidArgument, "drift must be finite");
  DriftField f;
  f.dim_ = static_cast<int>(offset.size());
  f.kind_ = linear.isZero(0.0) ? Kind::kConstant : Kind::kAffine;
  f.offset_ = std::move(offset);
  f.linear_ = std::move(linear);
  return f;
}

DriftField DriftField::custom(int dim, Fn fn) {
  DriftField f;
  f.dim_ = dim;
  f.kind_ = Kind::kCustom;
  f.fn_ = std::move(fn);
  return f;
}

Vec DriftField::operator()(const Vec& x) const {
  Vec out(dim_);
  evaluate(x, out);
  return out;
}

void DriftField::evaluate(const Vec& x, Vec& out) const {
  switch (kind_) {
    case Kind::kConstant:
      out = offset_;
      return;
    case Kind::kAffine:
      out = offset_;
      out.noalias() += linear_ * x;
      return;
    case Kind::kCustom:
      out = fn_(x);
      if (out.size() != dim_) fail(ErrorCode::kDimensionMismatch, "custom drift returned the wrong dimension");
      return;
  }
}

// --- CovarianceField ---

CovarianceField CovarianceField::identity(int dim) { return constant(Mat::Identity(dim, dim)); }

CovarianceField CovarianceField::constant(Mat value) {
  CovarianceField f;
  f.sqrt_ = psd_sqrt(value);
  f.dim_ = static_cast<int>(value.rows());
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (value + value.transpose()), Eigen::EigenvaluesOnly);
  f.norm_ = eig.eigenvalues().maxCoeff();
  f.value_ = std::move(value);
  return f;
}

CovarianceField CovarianceField::custom(int dim, Fn fn) {
  CovarianceField f;
  f.dim_ = dim;
  f.fn_ = std::move(fn);
  return f;
}

Mat CovarianceField::operator()(const Vec& x) const {
  if (!fn_) return value_;
  Mat a = fn_(x);
  if (a.rows() != dim_ || a.cols() != dim_) {
    fail(ErrorCode::kDimensionMismatch, "custom covariance returned the wrong shape");
  }
  return a;
}

Mat CovarianceField::sqrt_at(const Vec& x) const {
  if (!fn_) return sqrt_;
  return psd_sqrt((*this)(x));
}

// --- ReflectionField ---

ReflectionField ReflectionField::normal() { return ReflectionField{}; }

ReflectionField ReflectionField::constant(Vec direction) {
  if (!direction.allFinite() || direction.size() == 0) {
    fail(ErrorCode::kInvalidArgument, "reflection direction must be a finite vector");
  }
  ReflectionField f;
  f.kind_ = Kind::kConstant;
  f.direction_ = std::move(direction);
  return f;
}

ReflectionField ReflectionField::matrix(Mat columns) {
  if (!columns.allFinite() || columns.size() == 0) {
    fail(ErrorCode::kInvalidArgument, "reflection matrix must be finite and non-empty");
  }
  ReflectionField f;
  f.kind_ = Kind::kMatrix;
  f.columns_ = std::move(columns);
  return f;
}

ReflectionField ReflectionField::rotated(double angle) {
  if (!std::isfinite(angle) || std::abs(angle) >= M_PI / 2) {
    fail(ErrorCode::kNotInwardPointing, "rotation angle must lie strictly inside (-pi/2, pi/2)");
  }
  ReflectionField f;
  f.kind_ = Kind::kRotated;
  f.angle_ = angle;
  return f;
}

ReflectionField ReflectionField::custom(Fn fn) {
  ReflectionField f;
  f.kind_ = Kind::kCustom;
  f.fn_ = std::move(fn);
  return f;
}

Vec ReflectionField::at(const BoundaryPoint& z) const {
  const Vec& n = z.inward_normal;
  switch (kind_) {
    case Kind::kNormal:
      return n;
    case Kind::kConstant:
      return normalize_reflection(direction_, n);
    case Kind::kMatrix: {
      if (!z.face || *z.face < 1 || *z.face > columns_.cols()) {
        fail(ErrorCode::kInvalidArgument, "matrix reflection needs a face index within the matrix columns");
      }
      if (columns_.rows() != n.size()) fail(ErrorCode::kDimensionMismatch, "reflection matrix row count != dimension");
      return normalize_reflection(columns_.col(*z.face - 1), n);
    }
    case Kind::kRotated: {
      if (n.size() != 2) fail(ErrorCode::kUnsupported, "rotated reflection is planar only");
      Vec turned(2);
      turned << -n(1), n(0);
      return n + std::tan(angle_) * turned;
    }
    case Kind::kCustom:
      return normalize_reflection(fn_(z), n);
  }
  return n;
}

Mat ReflectionField::polyhedron_matrix(const Polyhedron& p) const {
  const Eigen::Index m = p.normals.rows();
  const Eigen::Index d = p.normals.cols();
  if (kind_ == Kind::kMatrix && columns_.cols() != m) {
    fail(ErrorCode::kDimensionMismatch,
         "reflection matrix has " + std::to_string(columns_.cols()) + " columns for " +
             std::to_string(m) + " faces");
  }
  Mat out(d, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Vec n = p.normals.row(i).transpose();
    BoundaryPoint z{p.offsets(i) * n, n, static_cast<int>(i) + 1};
    try {
      out.col(i) = at(z);
    } catch (const Error& e) {
      fail(e.code(), "face " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

// --- DiffusionSpec ---

void DiffusionSpec::validate(const Domain& domain) const {
  const int d = domain.dim();
  if (drift.dim() != d) fail(ErrorCode::kDimensionMismatch, "drift dimension does not match the domain");
  if (covariance.dim() != d) fail(ErrorCode::kDimensionMismatch, "covariance dimension does not match the domain");
  require_dim(start, d, "start point");
  if (!start.allFinite()) fail(ErrorCode::kInvalidArgument, "start point must be finite");
  if (signed_distance(domain, start) < -1e-12) {
    fail(ErrorCode::kInvalidArgument, "start point lies outside the closure of the domain");
  }
  if (const auto* p = domain.as_polyhedron()) (void)reflection.polyhedron_matrix(*p);
  if (reflection.kind() == ReflectionField::Kind::kMatrix && !domain.as_polyhedron()) {
    fail(ErrorCode::kInvalidArgument, "a reflection matrix needs a polyhedral domain");
  }
}

DiffusionSpec brownian_spec(Vec start) {
  const int d = static_cast<int>(start.size());
  return DiffusionSpec{DriftField::zero(d), CovarianceField::identity(d),
                       ReflectionField::normal(), std::move(start)};
}

}  // namespace reflectolab
