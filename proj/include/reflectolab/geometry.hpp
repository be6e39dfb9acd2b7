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

// Exact geometry for the supported domain classes.
//
// Every domain D is open; its closure is the state space of the reflected
// process. The signed distance is positive inside D, zero on the boundary and
// negative outside the closure. The whole space has no boundary and reports
// +infinity everywhere.

#ifndef REFLECTOLAB_GEOMETRY_HPP_
#define REFLECTOLAB_GEOMETRY_HPP_

#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "reflectolab/linalg.hpp"

namespace reflectolab {

inline constexpr double kUnitNormTolerance = 1e-12;
inline constexpr double kTieTolerance = 1e-10;
inline constexpr double kFeasibilityTolerance = 1e-10;

enum class DomainKind {
  kPolyhedron,
  kBall,
  kHalfSpace,
  kWholeSpace,
  kPuncturedSpace,
  kBallComplement,
  kNotchedHalfPlane,
};

std::string_view domain_kind_name(DomainKind kind) noexcept;

// {x : n_i . x > b_i for all i}; row i of `normals` is n_i.
struct Polyhedron {
  Mat normals;
  Vec offsets;
};

struct Ball {
  Vec center;
  double radius = 1.0;
};

// Open exterior of a closed ball.
struct BallComplement {
  Vec center;
  double radius = 1.0;
};

struct HalfSpace {
  Vec normal;
  double offset = 0.0;
};

struct WholeSpace {};

// point + span(directions); directions are orthonormal columns.
struct AffineComponent {
  Vec point;
  Mat directions;
};

// R^d minus a finite union of affine subspaces of dimension <= d - 2.
struct PuncturedSpace {
  std::vector<AffineComponent> excluded;
};

// Interior of (R x [0, inf)) minus the closed rectangle [left, right] x
// [0, height]. Planar only; used for set-convergence diagnostics.
struct NotchedHalfPlane {
  double left = 0.0;
  double right = 1.0;
  double height = 1.0;
};

struct Box {
  Vec lo;
  Vec hi;
};

struct BoundaryPoint {
  Vec point;
  Vec inward_normal;
  std::optional<int> face;
};

class Domain {
 public:
  static Domain polyhedron(Mat normals, Vec offsets);
  static Domain orthant(int dim);
  static Domain ball(Vec center, double radius);
  static Domain ball_complement(Vec center, double radius);
  static Domain half_space(Vec normal, double offset);
  static Domain whole_space(int dim);
  static Domain punctured_space(int dim, std::vector<AffineComponent> excluded);
  static Domain notched_half_plane(double left, double right, double height);

  DomainKind kind() const noexcept;
  int dim() const noexcept { return dim_; }

  // Bounded domains admit a Hausdorff distance without a clipping box.
  bool is_bounded() const noexcept { return kind() == DomainKind::kBall; }

  const Polyhedron* as_polyhedron() const noexcept {
    return std::get_if<Polyhedron>(&shape_);
  }
  const Ball* as_ball() const noexcept { return std::get_if<Ball>(&shape_); }
  const BallComplement* as_ball_complement() const noexcept {
    return std::get_if<BallComplement>(&shape_);
  }
  const HalfSpace* as_half_space() const noexcept {
    return std::get_if<HalfSpace>(&shape_);
  }
  const PuncturedSpace* as_punctured_space() const noexcept {
    return std::get_if<PuncturedSpace>(&shape_);
  }
  const NotchedHalfPlane* as_notched_half_plane() const noexcept {
    return std::get_if<NotchedHalfPlane>(&shape_);
  }

  // True when the polyhedron is the standard orthant {x_i > 0}.
  bool is_orthant() const noexcept;

 private:
  using Shape = std::variant<Polyhedron, Ball, HalfSpace, WholeSpace,
                             PuncturedSpace, BallComplement, NotchedHalfPlane>;
  Domain(int dim, Shape shape) : dim_(dim), shape_(std::move(shape)) {}

  int dim_;
  Shape shape_;
};

double signed_distance(const Domain& domain, const Vec& x);

// Closure membership with a tolerance on the signed distance.
inline bool in_closure(const Domain& domain, const Vec& x, double tol = 0.0) {
  return signed_distance(domain, x) >= -tol;
}

// Nearest point of the closed domain; identity for points already inside.
Vec project_onto_closure(const Domain& domain, const Vec& x);

// The nearest boundary point zeta(x) with its inward normal. Throws
// kAmbiguousProjection when two boundary pieces tie within kTieTolerance and
// kCenterSingular at a ball center. Domains without a codimension-one
// boundary (whole and punctured space) report kUnsupported.
BoundaryPoint nearest_boundary_point(const Domain& domain, const Vec& x);

// dist(x, V) where V is the non-smooth part of the boundary. +inf when V is
// empty. For punctured space the whole excluded set counts as V.
double exceptional_set_distance(const Domain& domain, const Vec& x);

struct Assumption1Report {
  double max_discrepancy = 0.0;
  std::vector<double> discrepancies;
  std::size_t boundary_samples = 0;
};

// Compares |phi(x)| = dist(x, dD) against dist(x, dD \ V) estimated on a
// boundary grid of spacing `h` that drops the `collar`-neighbourhood of V.
Assumption1Report check_assumption1(const Domain& domain,
                                    std::span<const Vec> probes,
                                    double h = 1e-3, double collar = 1e-6);

// True when the faces in `face_mask` (bit i is face i + 1) have a common
// point in the closure.
bool faces_meet(const Polyhedron& p, unsigned face_mask);

// Boundary points inside `box` on a grid of spacing about `h`. Curved
// boundaries are supported for d <= 3.
std::vector<Vec> sample_boundary(const Domain& domain, const Box& box,
                                 double h);

// Points of V inside `box` with spacing about `h`.
std::vector<Vec> sample_exceptional_set(const Domain& domain, const Box& box,
                                        double h);

}  // namespace reflectolab

#endif  // REFLECTOLAB_GEOMETRY_HPP_
