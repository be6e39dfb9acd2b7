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

#include "reflectolab/geometry.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

namespace reflectolab {
namespace {

constexpr int kMaxFaces = 20;
constexpr double kMaxGridPoints = 5e7;

// Minimum-norm solution of rows * x = rhs, or nullopt if inconsistent.
std::optional<Vec> solve_min_norm(const Mat& rows, const Vec& rhs) {
  if (rows.rows() == 0) return Vec::Zero(rows.cols());
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(rows);
  Vec x = cod.solve(rhs);
  const double scale = 1.0 + rhs.cwiseAbs().maxCoeff();
  if ((rows * x - rhs).cwiseAbs().maxCoeff() > 1e-9 * scale) return std::nullopt;
  return x;
}

Mat select_rows(const Mat& m, unsigned mask) {
  Mat out(std::popcount(mask), m.cols());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (mask & (1u << i)) out.row(r++) = m.row(i);
  }
  return out;
}

Vec select_entries(const Vec& v, unsigned mask) {
  Vec out(std::popcount(mask));
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (mask & (1u << i)) out(r++) = v(i);
  }
  return out;
}

bool polyhedron_feasible(const Polyhedron& p, const Vec& y, double tol) {
  return ((p.normals * y - p.offsets).array() >= -tol).all();
}

// Largest s such that some x satisfies n_i.x - s >= b_i (i != skip), s <= 1,
// and n_eq.x = b_eq when `equality` is set. -inf if infeasible. The optimum
// sits at a basic solution, so brute force over active sets finds it.
double max_slack(const Polyhedron& p, int equality) {
  const Eigen::Index d = p.normals.cols();
  const Eigen::Index m = p.normals.rows();
  // Constraint rows over z = (x, s). Index m is the cap s <= 1.
  Mat rows = Mat::Zero(m + 1, d + 1);
  Vec rhs(m + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    rows.row(i).head(d) = p.normals.row(i);
    rows(i, d) = -1.0;
    rhs(i) = p.offsets(i);
  }
  rows(m, d) = 1.0;
  rhs(m) = 1.0;

  double best = -kInf;
  const unsigned total = 1u << (m + 1);
  for (unsigned mask = 0; mask < total; ++mask) {
    if (equality >= 0 && (mask & (1u << equality))) continue;
    const int active = std::popcount(mask) + (equality >= 0 ? 1 : 0);
    if (active > d + 1) continue;
    Mat sys(active, d + 1);
    Vec b(active);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (mask & (1u << i)) {
        sys.row(r) = rows.row(i);
        b(r++) = rhs(i);
      }
    }
    if (equality >= 0) {
      sys.row(r).setZero();
      sys.row(r).head(d) = p.normals.row(equality);
      b(r) = p.offsets(equality);
    }
    const auto z = solve_min_norm(sys, b);
    if (!z) continue;
    const Vec x = z->head(d);
    const double s = (*z)(d);
    if (s > 1.0 + 1e-9) continue;
    bool ok = true;
    for (Eigen::Index i = 0; i < m && ok; ++i) {
      if (i == equality) {
        ok = std::abs(p.normals.row(i).dot(x) - p.offsets(i)) <= 1e-9;
      } else {
        ok = p.normals.row(i).dot(x) - s >= p.offsets(i) - 1e-9;
      }
    }
    if (ok) best = std::max(best, s);
  }
  return best;
}

void validate_unit(const Vec& n, const std::string& what) {
  if (!n.allFinite() || std::abs(n.norm() - 1.0) > kUnitNormTolerance) {
    fail(ErrorCode::kInvalidDomain, what + " is not a unit vector (norm " +
                                        std::to_string(n.norm()) + ")");
  }
}

double distance_to_affine(const AffineComponent& c, const Vec& x) {
  const Vec rel = x - c.point;
  if (c.directions.cols() == 0) return rel.norm();
  const Vec along = c.directions * (c.directions.transpose() * rel);
  return (rel - along).norm();
}

// Closest point of the closed polyhedron to x, by enumerating active sets.
Vec project_polyhedron(const Polyhedron& p, const Vec& x) {
  if (polyhedron_feasible(p, x, 0.0)) return x;
  const Eigen::Index d = p.normals.cols();
  const Eigen::Index m = p.normals.rows();
  Vec best = x;
  double best_dist = kInf;
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    if (std::popcount(mask) > d) continue;
    const Mat rows = select_rows(p.normals, mask);
    const Vec rhs = select_entries(p.offsets, mask) - rows * x;
    const auto delta = solve_min_norm(rows, rhs);
    if (!delta) continue;
    const Vec y = x + *delta;
    if (!polyhedron_feasible(p, y, kFeasibilityTolerance)) continue;
    const double dist = delta->norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = y;
    }
  }
  if (!std::isfinite(best_dist)) {
    fail(ErrorCode::kInvalidDomain, "polyhedron projection found no feasible point");
  }
  return best;
}

double polyhedron_exceptional_distance(const Polyhedron& p, const Vec& x) {
  const Eigen::Index d = p.normals.cols();
  const Eigen::Index m = p.normals.rows();
  double best = kInf;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const unsigned pair = (1u << i) | (1u << j);
      for (unsigned mask = pair; mask < (1u << m); ++mask) {
        if ((mask & pair) != pair || std::popcount(mask) > d) continue;
        const Mat rows = select_rows(p.normals, mask);
        const Vec rhs = select_entries(p.offsets, mask) - rows * x;
        const auto delta = solve_min_norm(rows, rhs);
        if (!delta) continue;
        if (!polyhedron_feasible(p, x + *delta, kFeasibilityTolerance)) continue;
        best = std::min(best, delta->norm());
      }
    }
  }
  return best;
}

// Boundary pieces of the notched half-plane: 0 left ray, 1 right ray,
// 2 left wall, 3 right wall, 4 top of the notch.
struct Piece {
  Vec foot;
  double dist;
  Vec inward_normal;
};

std::array<Piece, 5> notched_pieces(const NotchedHalfPlane& s, const Vec& x) {
  auto make = [&](double px, double py, double nx, double ny) {
    Vec foot(2);
    foot << px, py;
    Vec n(2);
    n << nx, ny;
    return Piece{foot, (x - foot).norm(), n};
  };
  const double cx = x(0);
  const double cy = x(1);
  return {
      make(std::min(cx, s.left), 0.0, 0.0, 1.0),
      make(std::max(cx, s.right), 0.0, 0.0, 1.0),
      make(s.left, std::clamp(cy, 0.0, s.height), -1.0, 0.0),
      make(s.right, std::clamp(cy, 0.0, s.height), 1.0, 0.0),
      make(std::clamp(cx, s.left, s.right), s.height, 0.0, 1.0),
  };
}

bool notched_interior(const NotchedHalfPlane& s, const Vec& x) {
  if (x(1) <= 0.0) return false;
  return x(0) < s.left || x(0) > s.right || x(1) > s.height;
}

double notched_signed_distance(const NotchedHalfPlane& s, const Vec& x) {
  double dist = kInf;
  for (const auto& piece : notched_pieces(s, x)) dist = std::min(dist, piece.dist);
  return notched_interior(s, x) ? dist : -dist;
}

BoundaryPoint from_ball(const Vec& center, double radius, const Vec& x,
                        bool interior_is_inside) {
  const Vec rel = x - center;
  const double r = rel.norm();
  if (r <= kTieTolerance) {
    fail(ErrorCode::kCenterSingular,
         "nearest boundary point is not unique at the ball center");
  }
  const Vec dir = rel / r;
  return BoundaryPoint{center + radius * dir,
                       interior_is_inside ? Vec(-dir) : dir, std::nullopt};
}

std::vector<Vec> box_corners(const Box& box) {
  const Eigen::Index d = box.lo.size();
  std::vector<Vec> out;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    Vec c(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      c(k) = (mask & (1u << k)) ? box.hi(k) : box.lo(k);
    }
    out.push_back(std::move(c));
  }
  return out;
}

bool in_box(const Box& box, const Vec& x, double tol) {
  return ((x - box.lo).array() >= -tol).all() &&
         ((box.hi - x).array() >= -tol).all();
}

// Grid points of {anchor + basis * t} that land in the box; t ranges over
// multiples of h covering the box's tangent-coordinate footprint.
template <typename Keep>
void sample_affine(const Vec& anchor, const Mat& basis, const Box& box,
                   double h, Keep&& keep, std::vector<Vec>& out) {
  const Eigen::Index k = basis.cols();
  const double tol = 1e-9 * (1.0 + h);
  if (k == 0) {
    if (in_box(box, anchor, tol) && keep(anchor)) out.push_back(anchor);
    return;
  }
  Vec lo = Vec::Constant(k, kInf);
  Vec hi = Vec::Constant(k, -kInf);
  for (const auto& corner : box_corners(box)) {
    const Vec t = basis.transpose() * (corner - anchor);
    lo = lo.cwiseMin(t);
    hi = hi.cwiseMax(t);
  }
  std::vector<long> first(k);
  std::vector<long> count(k);
  double total = 1.0;
  for (Eigen::Index c = 0; c < k; ++c) {
    first[c] = static_cast<long>(std::ceil(lo(c) / h - 1e-9));
    const long last = static_cast<long>(std::floor(hi(c) / h + 1e-9));
    count[c] = std::max(0L, last - first[c] + 1);
    total *= static_cast<double>(count[c]);
  }
  if (total > kMaxGridPoints) {
    fail(ErrorCode::kInvalidArgument,
         "boundary sampling grid too large; increase the spacing");
  }
  if (total == 0.0) return;
  std::vector<long> idx(k, 0);
  Vec t(k);
  while (true) {
    for (Eigen::Index c = 0; c < k; ++c) {
      t(c) = static_cast<double>(first[c] + idx[c]) * h;
    }
    const Vec p = anchor + basis * t;
    if (in_box(box, p, tol) && keep(p)) out.push_back(p);
    Eigen::Index c = 0;
    while (c < k && ++idx[c] == count[c]) idx[c++] = 0;
    if (c == k) break;
  }
}

void sample_sphere(const Vec& center, double radius, const Box& box, double h,
                   std::vector<Vec>& out) {
  const Eigen::Index d = center.size();
  const double tol = 1e-9 * (1.0 + h);
  auto push = [&](Vec p) {
    if (in_box(box, p, tol)) out.push_back(std::move(p));
  };
  constexpr double kPi = std::numbers::pi;
  if (d == 1) {
    push(center + Vec::Constant(1, radius));
    push(center - Vec::Constant(1, radius));
  } else if (d == 2) {
    const long n = std::max(8L, static_cast<long>(std::ceil(2 * kPi * radius / h)));
    for (long i = 0; i < n; ++i) {
      const double a = 2 * kPi * static_cast<double>(i) / static_cast<double>(n);
      Vec p(2);
      p << center(0) + radius * std::cos(a), center(1) + radius * std::sin(a);
      push(std::move(p));
    }
  } else if (d == 3) {
    const long rings = std::max(4L, static_cast<long>(std::ceil(kPi * radius / h)));
    for (long i = 0; i <= rings; ++i) {
      const double polar = kPi * static_cast<double>(i) / static_cast<double>(rings);
      const double ring_radius = radius * std::sin(polar);
      const long n = std::max(1L, static_cast<long>(std::ceil(2 * kPi * ring_radius / h)));
      for (long j = 0; j < n; ++j) {
        const double a = 2 * kPi * static_cast<double>(j) / static_cast<double>(n);
        Vec p(3);
        p << center(0) + ring_radius * std::cos(a),
            center(1) + ring_radius * std::sin(a),
            center(2) + radius * std::cos(polar);
        push(std::move(p));
      }
    }
  } else {
    fail(ErrorCode::kUnsupported, "sphere sampling is implemented for d <= 3");
  }
}

void sample_segment(const Vec& a, const Vec& b, const Box& box, double h,
                    std::vector<Vec>& out) {
  const double len = (b - a).norm();
  const long n = std::max(1L, static_cast<long>(std::ceil(len / h)));
  for (long i = 0; i <= n; ++i) {
    const Vec p = a + (b - a) * (static_cast<double>(i) / static_cast<double>(n));
    if (in_box(box, p, 1e-9)) out.push_back(p);
  }
}

}  // namespace

bool faces_meet(const Polyhedron& p, unsigned face_mask) {
  const Eigen::Index d = p.normals.cols();
  const Eigen::Index m = p.normals.rows();
  const int limit = std::max<int>(static_cast<int>(d), std::popcount(face_mask));
  for (unsigned mask = face_mask; mask < (1u << m); ++mask) {
    if ((mask & face_mask) != face_mask || std::popcount(mask) > limit) continue;
    const auto y = solve_min_norm(select_rows(p.normals, mask), select_entries(p.offsets, mask));
    if (y && polyhedron_feasible(p, *y, kFeasibilityTolerance)) return true;
  }
  return false;
}

std::string_view domain_kind_name(DomainKind kind) noexcept {
  switch (kind) {
    case DomainKind::kPolyhedron: return "polyhedron";
    case DomainKind::kBall: return "ball";
    case DomainKind::kHalfSpace: return "half_space";
    case DomainKind::kWholeSpace: return "whole_space";
    case DomainKind::kPuncturedSpace: return "punctured_space";
    case DomainKind::kBallComplement: return "ball_complement";
    case DomainKind::kNotchedHalfPlane: return "notched_half_plane";
  }
  return "unknown";
}

Domain Domain::polyhedron(Mat normals, Vec offsets) {
  const Eigen::Index m = normals.rows();
  const Eigen::Index d = normals.cols();
  if (m < 1 || d < 1) fail(ErrorCode::kInvalidDomain, "polyhedron needs at least one face");
  if (m > kMaxFaces) {
    fail(ErrorCode::kInvalidDomain,
         "polyhedron has " + std::to_string(m) + " faces; at most " +
             std::to_string(kMaxFaces) + " are supported");
  }
  if (offsets.size() != m) {
    fail(ErrorCode::kDimensionMismatch, "polyhedron offsets do not match face count");
  }
  if (!offsets.allFinite()) fail(ErrorCode::kInvalidDomain, "polyhedron offsets must be finite");
  for (Eigen::Index i = 0; i < m; ++i) {
    validate_unit(normals.row(i).transpose(), "normal " + std::to_string(i + 1));
  }
  Polyhedron p{std::move(normals), std::move(offsets)};
  if (max_slack(p, -1) <= 1e-9) fail(ErrorCode::kInvalidDomain, "polyhedron is empty");
  for (Eigen::Index j = 0; j < m; ++j) {
    if (max_slack(p, static_cast<int>(j)) <= 1e-9) {
      fail(ErrorCode::kInvalidDomain,
           "face " + std::to_string(j + 1) + " is redundant");
    }
  }
  return Domain(static_cast<int>(d), std::move(p));
}

Domain Domain::orthant(int dim) {
  if (dim < 1) fail(ErrorCode::kInvalidDomain, "dimension must be positive");
  return polyhedron(Mat::Identity(dim, dim), Vec::Zero(dim));
}

Domain Domain::ball(Vec center, double radius) {
  if (center.size() < 1 || !center.allFinite()) fail(ErrorCode::kInvalidDomain, "ball center must be a finite point");
  if (!(radius > 0.0) || !std::isfinite(radius)) fail(ErrorCode::kInvalidDomain, "ball radius must be positive");
  const int d = static_cast<int>(center.size());
  return Domain(d, Ball{std::move(center), radius});
}

Domain Domain::ball_complement(Vec center, double radius) {
  if (center.size() < 1 || !center.allFinite()) fail(ErrorCode::kInvalidDomain, "ball center must be a finite point");
  if (!(radius > 0.0) || !std::isfinite(radius)) fail(ErrorCode::kInvalidDomain, "ball radius must be positive");
  const int d = static_cast<int>(center.size());
  return Domain(d, BallComplement{std::move(center), radius});
}

Domain Domain::half_space(Vec normal, double offset) {
  if (normal.size() < 1) fail(ErrorCode::kInvalidDomain, "half-space needs a normal");
  validate_unit(normal, "half-space normal");
  if (!std::isfinite(offset)) fail(ErrorCode::kInvalidDomain, "half-space offset must be finite");
  const int d = static_cast<int>(normal.size());
  return Domain(d, HalfSpace{std::move(normal), offset});
}

Domain Domain::whole_space(int dim) {
  if (dim < 1) fail(ErrorCode::kInvalidDomain, "dimension must be positive");
  return Domain(dim, WholeSpace{});
}

Domain Domain::punctured_space(int dim, std::vector<AffineComponent> excluded) {
  if (dim < 2) {
    fail(ErrorCode::kInvalidDomain,
         "punctured space needs d >= 2 (excluded set must have dimension <= d - 2)");
  }
  for (std::size_t c = 0; c < excluded.size(); ++c) {
    auto& comp = excluded[c];
    const std::string name = "excluded component " + std::to_string(c + 1);
    require_dim(comp.point, dim, name.c_str());
    if (comp.directions.cols() > 0 && comp.directions.rows() != dim) {
      fail(ErrorCode::kDimensionMismatch, name + " has directions of the wrong dimension");
    }
    if (comp.directions.cols() > dim - 2) {
      fail(ErrorCode::kInvalidDomain, name + " has dimension above d - 2");
    }
    if (comp.directions.cols() > 0) {
      // Orthonormalise so distances are exact projections.
      Eigen::HouseholderQR<Mat> qr(comp.directions);
      Mat q = qr.householderQ() * Mat::Identity(dim, comp.directions.cols());
      const Mat r = qr.matrixQR().topRows(comp.directions.cols()).triangularView<Eigen::Upper>();
      for (Eigen::Index k = 0; k < r.cols(); ++k) {
        if (std::abs(r(k, k)) < 1e-12) {
          fail(ErrorCode::kInvalidDomain, name + " has linearly dependent directions");
        }
      }
      comp.directions = std::move(q);
    }
  }
  return Domain(dim, PuncturedSpace{std::move(excluded)});
}

Domain Domain::notched_half_plane(double left, double right, double height) {
  if (!(left < right) || !(height > 0.0) || !std::isfinite(left) || !std::isfinite(right) ||
      !std::isfinite(height)) {
    fail(ErrorCode::kInvalidDomain, "notch needs left < right and positive height");
  }
  return Domain(2, NotchedHalfPlane{left, right, height});
}

DomainKind Domain::kind() const noexcept {
  return std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Polyhedron>) return DomainKind::kPolyhedron;
        if constexpr (std::is_same_v<T, Ball>) return DomainKind::kBall;
        if constexpr (std::is_same_v<T, HalfSpace>) return DomainKind::kHalfSpace;
        if constexpr (std::is_same_v<T, WholeSpace>) return DomainKind::kWholeSpace;
        if constexpr (std::is_same_v<T, PuncturedSpace>) return DomainKind::kPuncturedSpace;
        if constexpr (std::is_same_v<T, BallComplement>) return DomainKind::kBallComplement;
        if constexpr (std::is_same_v<T, NotchedHalfPlane>) return DomainKind::kNotchedHalfPlane;
      },
      shape_);
}

bool Domain::is_orthant() const noexcept {
  const auto* p = as_polyhedron();
  if (!p || p->normals.rows() != dim_) return false;
  return p->normals.isIdentity(0.0) && p->offsets.isZero(0.0);
}

double signed_distance(const Domain& domain, const Vec& x) {
  require_dim(x, domain.dim(), "signed_distance");
  if (const auto* p = domain.as_polyhedron()) {
    const Vec slack = p->normals * x - p->offsets;
    const double min_slack = slack.minCoeff();
    // Unit normals put the foot of the nearest supporting hyperplane inside
    // the closure, so the smallest slack is the interior distance.
    if (min_slack >= 0.0) return min_slack;
    return -(x - project_polyhedron(*p, x)).norm();
  }
  if (const auto* b = domain.as_ball()) return b->radius - (x - b->center).norm();
  if (const auto* b = domain.as_ball_complement()) return (x - b->center).norm() - b->radius;
  if (const auto* h = domain.as_half_space()) return h->normal.dot(x) - h->offset;
  if (const auto* s = domain.as_punctured_space()) {
    double dist = kInf;
    for (const auto& c : s->excluded) dist = std::min(dist, distance_to_affine(c, x));
    return dist;
  }
  if (const auto* n = domain.as_notched_half_plane()) return notched_signed_distance(*n, x);
  return kInf;  // whole space
}

Vec project_onto_closure(const Domain& domain, const Vec& x) {
  require_dim(x, domain.dim(), "project_onto_closure");
  if (signed_distance(domain, x) >= 0.0) return x;
  if (const auto* p = domain.as_polyhedron()) return project_polyhedron(*p, x);
  return nearest_boundary_point(domain, x).point;
}

BoundaryPoint nearest_boundary_point(const Domain& domain, const Vec& x) {
  require_dim(x, domain.dim(), "nearest_boundary_point");
  if (!x.allFinite()) fail(ErrorCode::kInvalidArgument, "point must be finite");
  if (const auto* p = domain.as_polyhedron()) {
    const Vec slack = p->normals * x - p->offsets;
    if (slack.minCoeff() >= 0.0) {
      Eigen::Index best = 0;
      slack.minCoeff(&best);
      for (Eigen::Index i = 0; i < slack.size(); ++i) {
        if (i != best && std::abs(slack(i) - slack(best)) <= kTieTolerance) {
          fail(ErrorCode::kAmbiguousProjection,
               "faces " + std::to_string(best + 1) + " and " + std::to_string(i + 1) +
                   " are equidistant");
        }
      }
      const Vec n = p->normals.row(best).transpose();
      return BoundaryPoint{x - slack(best) * n, n, static_cast<int>(best) + 1};
    }
    const Vec z = project_polyhedron(*p, x);
    const Vec zslack = p->normals * z - p->offsets;
    int active = -1;
    for (Eigen::Index i = 0; i < zslack.size(); ++i) {
      if (std::abs(zslack(i)) <= kTieTolerance) {
        if (active >= 0) {
          fail(ErrorCode::kAmbiguousProjection,
               "projection lands on the intersection of faces " +
                   std::to_string(active + 1) + " and " + std::to_string(i + 1));
        }
        active = static_cast<int>(i);
      }
    }
    if (active < 0) fail(ErrorCode::kInvalidDomain, "projection did not reach a face");
    return BoundaryPoint{z, p->normals.row(active).transpose(), active + 1};
  }
  if (const auto* b = domain.as_ball()) return from_ball(b->center, b->radius, x, true);
  if (const auto* b = domain.as_ball_complement()) {
    return from_ball(b->center, b->radius, x, false);
  }
  if (const auto* h = domain.as_half_space()) {
    return BoundaryPoint{x - (h->normal.dot(x) - h->offset) * h->normal, h->normal,
                         std::nullopt};
  }
  if (const auto* n = domain.as_notched_half_plane()) {
    const auto pieces = notched_pieces(*n, x);
    int best = 0;
    for (int i = 1; i < 5; ++i) {
      if (pieces[i].dist < pieces[best].dist) best = i;
    }
    for (int i = 0; i < 5; ++i) {
      if (i != best && std::abs(pieces[i].dist - pieces[best].dist) <= kTieTolerance) {
        fail(ErrorCode::kAmbiguousProjection, "boundary pieces are equidistant");
      }
    }
    return BoundaryPoint{pieces[best].foot, pieces[best].inward_normal, best + 1};
  }
  fail(ErrorCode::kUnsupported,
       std::string(domain_kind_name(domain.kind())) +
           " has no codimension-one boundary with a normal");
}

double exceptional_set_distance(const Domain& domain, const Vec& x) {
  require_dim(x, domain.dim(), "exceptional_set_distance");
  if (const auto* p = domain.as_polyhedron()) return polyhedron_exceptional_distance(*p, x);
  if (const auto* s = domain.as_punctured_space()) {
    double dist = kInf;
    for (const auto& c : s->excluded) dist = std::min(dist, distance_to_affine(c, x));
    return dist;
  }
  if (const auto* n = domain.as_notched_half_plane()) {
    double dist = kInf;
    for (double cx : {n->left, n->right}) {
      for (double cy : {0.0, n->height}) {
        Vec c(2);
        c << cx, cy;
        dist = std::min(dist, (x - c).norm());
      }
    }
    return dist;
  }
  return kInf;
}

std::vector<Vec> sample_boundary(const Domain& domain, const Box& box, double h) {
  if (!(h > 0.0)) fail(ErrorCode::kInvalidArgument, "sampling spacing must be positive");
  require_dim(box.lo, domain.dim(), "sample_boundary box");
  require_dim(box.hi, domain.dim(), "sample_boundary box");
  std::vector<Vec> out;
  if (const auto* p = domain.as_polyhedron()) {
    for (Eigen::Index i = 0; i < p->normals.rows(); ++i) {
      const Vec n = p->normals.row(i).transpose();
      const Mat basis = orthonormal_complement(n.transpose());
      auto keep = [&](const Vec& y) {
        return polyhedron_feasible(*p, y, kFeasibilityTolerance);
      };
      sample_affine(p->offsets(i) * n, basis, box, h, keep, out);
    }
  } else if (const auto* b = domain.as_ball()) {
    sample_sphere(b->center, b->radius, box, h, out);
  } else if (const auto* b = domain.as_ball_complement()) {
    sample_sphere(b->center, b->radius, box, h, out);
  } else if (const auto* hs = domain.as_half_space()) {
    const Mat basis = orthonormal_complement(hs->normal.transpose());
    sample_affine(hs->offset * hs->normal, basis, box, h, [](const Vec&) { return true; },
                  out);
  } else if (const auto* s = domain.as_punctured_space()) {
    for (const auto& c : s->excluded) {
      sample_affine(c.point, c.directions, box, h, [](const Vec&) { return true; }, out);
    }
  } else if (const auto* n = domain.as_notched_half_plane()) {
    auto pt = [](double a, double b) {
      Vec v(2);
      v << a, b;
      return v;
    };
    sample_segment(pt(std::min(box.lo(0), n->left), 0.0), pt(n->left, 0.0), box, h, out);
    sample_segment(pt(n->right, 0.0), pt(std::max(box.hi(0), n->right), 0.0), box, h, out);
    sample_segment(pt(n->left, 0.0), pt(n->left, n->height), box, h, out);
    sample_segment(pt(n->right, 0.0), pt(n->right, n->height), box, h, out);
    sample_segment(pt(n->left, n->height), pt(n->right, n->height), box, h, out);
  }
  return out;
}

std::vector<Vec> sample_exceptional_set(const Domain& domain, const Box& box, double h) {
  if (!(h > 0.0)) fail(ErrorCode::kInvalidArgument, "sampling spacing must be positive");
  std::vector<Vec> out;
  if (const auto* p = domain.as_polyhedron()) {
    const Eigen::Index m = p->normals.rows();
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = i + 1; j < m; ++j) {
        Mat rows(2, p->normals.cols());
        rows.row(0) = p->normals.row(i);
        rows.row(1) = p->normals.row(j);
        Vec rhs(2);
        rhs << p->offsets(i), p->offsets(j);
        const auto anchor = solve_min_norm(rows, rhs);
        if (!anchor) continue;
        const Mat basis = orthonormal_complement(rows);
        auto keep = [&](const Vec& y) {
          return polyhedron_feasible(*p, y, kFeasibilityTolerance);
        };
        sample_affine(*anchor, basis, box, h, keep, out);
      }
    }
  } else if (const auto* s = domain.as_punctured_space()) {
    for (const auto& c : s->excluded) {
      sample_affine(c.point, c.directions, box, h, [](const Vec&) { return true; }, out);
    }
  } else if (const auto* n = domain.as_notched_half_plane()) {
    for (double cx : {n->left, n->right}) {
      for (double cy : {0.0, n->height}) {
        Vec c(2);
        c << cx, cy;
        if (in_box(box, c, 1e-9)) out.push_back(c);
      }
    }
  }
  return out;
}

Assumption1Report check_assumption1(const Domain& domain, std::span<const Vec> probes,
                                    double h, double collar) {
  Assumption1Report report;
  report.discrepancies.assign(probes.size(), 0.0);
  if (probes.empty()) return report;
  for (const auto& x : probes) {
    require_dim(x, domain.dim(), "check_assumption1 probe");
    if (!x.allFinite()) fail(ErrorCode::kInvalidArgument, "probes must be finite");
  }

  const bool has_exceptional_set =
      (domain.as_polyhedron() && domain.as_polyhedron()->normals.rows() >= 2) ||
      domain.as_notched_half_plane() || domain.as_punctured_space();
  if (!has_exceptional_set) return report;  // dD \ V = dD

  if (const auto* s = domain.as_punctured_space(); s && !s->excluded.empty()) {
    // The whole boundary is exceptional.
    report.discrepancies.assign(probes.size(), kInf);
    report.max_discrepancy = kInf;
    return report;
  }

  Vec lo = probes[0];
  Vec hi = probes[0];
  double reach = 0.0;
  for (const auto& x : probes) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
    reach = std::max(reach, std::abs(signed_distance(domain, x)));
  }
  const double pad = reach + 2.0 * h;
  const Box box{lo.array() - pad, hi.array() + pad};
  std::vector<Vec> samples;
  for (auto& s : sample_boundary(domain, box, h)) {
    if (exceptional_set_distance(domain, s) >= collar) samples.push_back(std::move(s));
  }
  report.boundary_samples = samples.size();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    double nearest = kInf;
    for (const auto& s : samples) nearest = std::min(nearest, (probes[i] - s).norm());
    const double exact = std::abs(signed_distance(domain, probes[i]));
    report.discrepancies[i] = std::abs(nearest - exact);
    report.max_discrepancy = std::max(report.max_discrepancy, report.discrepancies[i]);
  }
  return report;
}

}  // namespace reflectolab
