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

// Diagnostics for convergence of domains D_n -> D_0 (weak, Wijsman,
// Hausdorff) and of coefficient fields that live on varying domains. Every
// supremum is estimated on a probe grid; since signed distances are
// 1-Lipschitz the grid error is at most the spacing h.

#ifndef REFLECTOLAB_SET_CONVERGENCE_HPP_
#define REFLECTOLAB_SET_CONVERGENCE_HPP_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "reflectolab/diffusion.hpp"
#include "reflectolab/geometry.hpp"

namespace reflectolab {

struct DomainSequence {
  std::string name;
  std::function<Domain(int)> member;  // n >= 1
  Domain limit = Domain::whole_space(1);

  Domain at(int n) const { return n == 0 ? limit : member(n); }
  int dim() const noexcept { return limit.dim(); }
};

namespace sequences {

DomainSequence constant(Domain d);
// Ball(center(n), radius(n)) -> limit.
DomainSequence balls(std::function<Vec(int)> center, std::function<double(int)> radius,
                     Domain limit);
// Ball(0, n) expanding to the whole space.
DomainSequence expanding_balls(int dim);
// U(n e_1, n) increasing to the half-space {x_1 > 0}.
DomainSequence tangent_balls(int dim);
// R^d minus the closed ball of radius 1/n, converging to R^d \ {0}.
DomainSequence shrinking_holes(int dim);
// (R x R_+) minus the notch [2^{-n-1}, 2^{-n}] x [0, 1], with limit the
// upper half-plane.
DomainSequence slit();
// The quadrant rotated by angle(n), with limit the quadrant.
DomainSequence rotating_quadrant(std::function<double(int)> angle);
// Wedge {x_2 > 0, sin(a_n) x_1 + cos(a_n) x_2 > 0} flattening to the upper
// half-plane; its corner has no counterpart in the limit.
DomainSequence flattening_wedge(std::function<double(int)> angle);
// Faces fixed, offsets b_i + shift_i / n.
DomainSequence shifted_polyhedron(const Polyhedron& base, Vec shift);

}  // namespace sequences

// Rotation of the plane by `angle` applied to the face normals.
Domain rotated_quadrant(double angle);

struct ProbeSet {
  enum class Region { kBox, kBall };

  Region region = Region::kBox;
  Box box;
  Vec center;
  double radius = 0.0;
  double h = 0.01;
  std::vector<Vec> extra;

  static ProbeSet box_grid(Vec lo, Vec hi, double h = 0.01);
  static ProbeSet ball_grid(Vec center, double radius, double h = 0.01);
  static ProbeSet points_only(std::vector<Vec> points);

  int dim() const;
  // Grid of spacing <= h covering K (endpoints included) plus the extras.
  std::vector<Vec> points() const;
  // Corners of the box, or the axis extremes of the ball.
  std::vector<Vec> extreme_points() const;
  // Axis-aligned box containing K and the extras.
  Box bounding_box() const;
};

// Default threshold standing in for phi_0 = +inf when the limit is the whole
// space: the gap is max(0, threshold - min phi_n).
inline constexpr double kWholeSpaceThreshold = 10.0;

double weak_convergence_gap(const DomainSequence& seq, int n, const ProbeSet& probes,
                            double whole_space_threshold = kWholeSpaceThreshold);

enum class WijsmanTarget { kBoundary, kDomain, kComplement };

double wijsman_gap(const DomainSequence& seq, int n, WijsmanTarget target,
                   const ProbeSet& probes);

// Two-sided Hausdorff distance of the closures, estimated on a grid over
// the box plus boundary samples. Without a box both domains must be balls.
double hausdorff_distance(const Domain& a, const Domain& b, double h,
                          const std::optional<Box>& box = std::nullopt);

enum class MonotoneDirection { kIncreasing, kDecreasing };

struct MonotoneReport {
  std::vector<double> gaps;           // n = 1..N
  std::vector<int> violations;        // n where the gap grew
  bool converging = false;
};

// Spot-checks D_n c D_{n+1} (or closures decreasing) on the probes, then
// tracks the weak gap along n = 1..N. Throws kNotMonotone.
MonotoneReport monotone_implies_weak(const DomainSequence& seq, MonotoneDirection direction,
                                     const ProbeSet& probes, int max_index);

// max over sampled V_n in K of dist(x, V_0); +inf when V_n meets K but V_0
// is empty, 0 when V_n misses K.
double exceptional_set_condition_b(const DomainSequence& seq, int n, const ProbeSet& k);

struct FieldSequence {
  enum class Kind { kDrift, kCovariance, kReflection };

  Kind kind = Kind::kDrift;
  // Value of the n-th field (n = 0 is the limit) at z, flattened to a
  // vector. For reflection fields z lies on the boundary of `domain`.
  std::function<Vec(int n, const Domain& domain, const Vec& z)> value;

  static FieldSequence drift(std::function<DriftField(int)> fields);
  static FieldSequence covariance(std::function<CovarianceField(int)> fields);
  static FieldSequence reflection(std::function<ReflectionField(int)> fields);
};

std::string_view field_kind_name(FieldSequence::Kind kind) noexcept;

// sup over matched pairs (z_n, z_0) of |f_n(z_n) - f_0(z_0)|. Probes are
// taken in the closure of D_0 (drift, covariance) or mapped to the smooth
// boundary of D_0 (reflection, keeping a 10h distance from V_0); z_n is the
// projection of z_0 onto the matching set of D_n. Throws kProjectionFailed
// when that projection is farther than 10h.
double field_convergence_gap(const FieldSequence& fields, const DomainSequence& seq, int n,
                             const ProbeSet& probes);

// Smallest n0 with K c D_n for every n in (n0, max_index], checked at the
// grid and extreme points. Throws kNotFound when K is not inside D_max.
int compact_containment_index(const DomainSequence& seq, const ProbeSet& k, int max_index);

}  // namespace reflectolab

#endif  // REFLECTOLAB_SET_CONVERGENCE_HPP_
