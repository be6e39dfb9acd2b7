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

#include "reflectolab/set_convergence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace reflectolab {
namespace {

constexpr double kMaxProbePoints = 2e7;

Mat rotation(double angle) {
  Mat r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

void require_index(int n, const char* what) {
  if (n < 1) fail(ErrorCode::kInvalidArgument, std::string(what) + ": index must be >= 1");
}

void grid_points(const Box& box, double h, std::vector<Vec>& out,
                 const std::function<bool(const Vec&)>& keep) {
  const Eigen::Index d = box.lo.size();
  std::vector<long> count(static_cast<std::size_t>(d));
  double total = 1.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double len = box.hi(i) - box.lo(i);
    count[static_cast<std::size_t>(i)] = len <= 0.0 ? 1 : static_cast<long>(std::ceil(len / h - 1e-9)) + 1;
    total *= static_cast<double>(count[static_cast<std::size_t>(i)]);
  }
  if (total > kMaxProbePoints) {
    fail(ErrorCode::kInvalidArgument, "probe grid would hold " + std::to_string(total) +
                                          " points; raise h or shrink K");
  }
  std::vector<long> idx(static_cast<std::size_t>(d), 0);
  Vec x(d);
  while (true) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const long c = count[static_cast<std::size_t>(i)];
      const long k = idx[static_cast<std::size_t>(i)];
      x(i) = c == 1 ? box.lo(i)
                    : (k == c - 1 ? box.hi(i)
                                  : box.lo(i) + (box.hi(i) - box.lo(i)) * static_cast<double>(k) /
                                                    static_cast<double>(c - 1));
    }
    if (keep(x)) out.push_back(x);
    Eigen::Index axis = 0;
    while (axis < d) {
      auto& k = idx[static_cast<std::size_t>(axis)];
      if (++k < count[static_cast<std::size_t>(axis)]) break;
      k = 0;
      ++axis;
    }
    if (axis == d) break;
  }
}

// |a - b| with the convention inf - inf = 0.
double saturating_gap(double a, double b) {
  if (std::isinf(a) && std::isinf(b) && (a > 0) == (b > 0)) return 0.0;
  return std::abs(a - b);
}

double distance_to_target(const Domain& d, const Vec& x, WijsmanTarget target) {
  const double phi = signed_distance(d, x);
  switch (target) {
    case WijsmanTarget::kBoundary:
      return std::abs(phi);
    case WijsmanTarget::kDomain:
      return std::max(0.0, -phi);
    case WijsmanTarget::kComplement:
      return std::max(0.0, phi);
  }
  return phi;
}

Vec flatten(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

}  // namespace

Domain rotated_quadrant(double angle) {
  const Mat normals = Mat::Identity(2, 2) * rotation(angle).transpose();
  return Domain::polyhedron(normals, Vec::Zero(2));
}

namespace sequences {

DomainSequence constant(Domain d) {
  return DomainSequence{"constant", [d](int) { return d; }, d};
}

DomainSequence balls(std::function<Vec(int)> center, std::function<double(int)> radius,
                     Domain limit) {
  return DomainSequence{"balls",
                        [center = std::move(center), radius = std::move(radius)](int n) {
                          return Domain::ball(center(n), radius(n));
                        },
                        std::move(limit)};
}

DomainSequence expanding_balls(int dim) {
  return DomainSequence{"expanding_balls",
                        [dim](int n) { return Domain::ball(Vec::Zero(dim), n); },
                        Domain::whole_space(dim)};
}

DomainSequence tangent_balls(int dim) {
  return DomainSequence{"tangent_balls",
                        [dim](int n) {
                          Vec c = Vec::Zero(dim);
                          c(0) = n;
                          return Domain::ball(c, n);
                        },
                        Domain::half_space(Vec::Unit(dim, 0), 0.0)};
}

DomainSequence shrinking_holes(int dim) {
  return DomainSequence{
      "shrinking_holes",
      [dim](int n) { return Domain::ball_complement(Vec::Zero(dim), 1.0 / n); },
      Domain::punctured_space(dim, {AffineComponent{Vec::Zero(dim), Mat(dim, 0)}})};
}

DomainSequence slit() {
  return DomainSequence{"slit",
                        [](int n) {
                          const double right = std::ldexp(1.0, -n);
                          return Domain::notched_half_plane(0.5 * right, right, 1.0);
                        },
                        Domain::half_space(Vec::Unit(2, 1), 0.0)};
}

DomainSequence rotating_quadrant(std::function<double(int)> angle) {
  return DomainSequence{"rotating_quadrant",
                        [angle = std::move(angle)](int n) { return rotated_quadrant(angle(n)); },
                        Domain::orthant(2)};
}

DomainSequence flattening_wedge(std::function<double(int)> angle) {
  return DomainSequence{"flattening_wedge",
                        [angle = std::move(angle)](int n) {
                          const double a = angle(n);
                          Mat normals(2, 2);
                          normals << 0.0, 1.0, std::sin(a), std::cos(a);
                          return Domain::polyhedron(normals, Vec::Zero(2));
                        },
                        Domain::half_space(Vec::Unit(2, 1), 0.0)};
}

DomainSequence shifted_polyhedron(const Polyhedron& base, Vec shift) {
  if (shift.size() != base.offsets.size()) {
    fail(ErrorCode::kDimensionMismatch, "shift needs one entry per face");
  }
  return DomainSequence{"shifted_polyhedron",
                        [base, shift](int n) {
                          return Domain::polyhedron(base.normals, base.offsets + shift / n);
                        },
                        Domain::polyhedron(base.normals, base.offsets)};
}

}  // namespace sequences

// --- ProbeSet ---

ProbeSet ProbeSet::box_grid(Vec lo, Vec hi, double h) {
  if (lo.size() != hi.size() || lo.size() == 0) fail(ErrorCode::kDimensionMismatch, "box corners differ in dimension");
  if (!(h > 0.0)) fail(ErrorCode::kInvalidArgument, "probe spacing h must be positive");
  if (((hi - lo).array() < 0.0).any()) fail(ErrorCode::kInvalidArgument, "box has hi < lo");
  ProbeSet p;
  p.region = Region::kBox;
  p.box = Box{std::move(lo), std::move(hi)};
  p.h = h;
  return p;
}

ProbeSet ProbeSet::ball_grid(Vec center, double radius, double h) {
  if (!(h > 0.0)) fail(ErrorCode::kInvalidArgument, "probe spacing h must be positive");
  if (!(radius >= 0.0)) fail(ErrorCode::kInvalidArgument, "probe ball radius must be >= 0");
  ProbeSet p;
  p.region = Region::kBall;
  p.center = std::move(center);
  p.radius = radius;
  p.h = h;
  return p;
}

ProbeSet ProbeSet::points_only(std::vector<Vec> points) {
  if (points.empty()) fail(ErrorCode::kInvalidArgument, "probe list is empty");
  ProbeSet p;
  p.region = Region::kBox;
  p.extra = std::move(points);
  return p;
}

int ProbeSet::dim() const {
  if (region == Region::kBall) return static_cast<int>(center.size());
  if (box.lo.size() > 0) return static_cast<int>(box.lo.size());
  return extra.empty() ? 0 : static_cast<int>(extra.front().size());
}

std::vector<Vec> ProbeSet::points() const {
  std::vector<Vec> out;
  if (region == Region::kBox && box.lo.size() > 0) {
    grid_points(box, h, out, [](const Vec&) { return true; });
  } else if (region == Region::kBall) {
    const Vec r = Vec::Constant(center.size(), radius);
    grid_points(Box{center - r, center + r}, h, out, [&](const Vec& x) {
      return (x - center).norm() <= radius * (1.0 + 1e-12);
    });
    for (const auto& e : extreme_points()) out.push_back(e);
  }
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

std::vector<Vec> ProbeSet::extreme_points() const {
  std::vector<Vec> out;
  if (region == Region::kBox && box.lo.size() > 0) {
    const Eigen::Index d = box.lo.size();
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      Vec c(d);
      for (Eigen::Index i = 0; i < d; ++i) c(i) = (mask & (1u << i)) ? box.hi(i) : box.lo(i);
      out.push_back(c);
    }
  } else if (region == Region::kBall) {
    out.push_back(center);
    for (Eigen::Index i = 0; i < center.size(); ++i) {
      out.push_back(center + radius * Vec::Unit(center.size(), i));
      out.push_back(center - radius * Vec::Unit(center.size(), i));
    }
  }
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

Box ProbeSet::bounding_box() const {
  const int d = dim();
  Box b{Vec::Constant(d, kInf), Vec::Constant(d, -kInf)};
  for (const auto& e : extreme_points()) {
    b.lo = b.lo.cwiseMin(e);
    b.hi = b.hi.cwiseMax(e);
  }
  return b;
}

// --- gaps ---

double weak_convergence_gap(const DomainSequence& seq, int n, const ProbeSet& probes,
                            double whole_space_threshold) {
  require_index(n, "weak_convergence_gap");
  const Domain dn = seq.at(n);
  const auto pts = probes.points();
  if (seq.limit.kind() == DomainKind::kWholeSpace) {
    double min_phi = kInf;
    for (const auto& x : pts) min_phi = std::min(min_phi, signed_distance(dn, x));
    if (std::isinf(min_phi) && min_phi > 0) return 0.0;
    return std::max(0.0, whole_space_threshold - min_phi);
  }
  double gap = 0.0;
  for (const auto& x : pts) {
    gap = std::max(gap, saturating_gap(signed_distance(dn, x), signed_distance(seq.limit, x)));
  }
  return gap;
}

double wijsman_gap(const DomainSequence& seq, int n, WijsmanTarget target,
                   const ProbeSet& probes) {
  require_index(n, "wijsman_gap");
  const Domain dn = seq.at(n);
  double gap = 0.0;
  for (const auto& x : probes.points()) {
    gap = std::max(gap, saturating_gap(distance_to_target(dn, x, target),
                                       distance_to_target(seq.limit, x, target)));
  }
  return gap;
}

double hausdorff_distance(const Domain& a, const Domain& b, double h,
                          const std::optional<Box>& box) {
  if (a.dim() != b.dim()) fail(ErrorCode::kDimensionMismatch, "domains differ in dimension");
  if (!(h > 0.0)) fail(ErrorCode::kInvalidArgument, "resolution h must be positive");
  Box region;
  if (box) {
    region = *box;
  } else {
    const Ball* ba = a.as_ball();
    const Ball* bb = b.as_ball();
    if (!ba || !bb) {
      fail(ErrorCode::kUnboundedWithoutBox, "Hausdorff distance of unbounded domains needs a box");
    }
    const Vec ra = Vec::Constant(a.dim(), ba->radius);
    const Vec rb = Vec::Constant(a.dim(), bb->radius);
    region = Box{(ba->center - ra).cwiseMin(bb->center - rb), (ba->center + ra).cwiseMax(bb->center + rb)};
  }
  std::vector<Vec> grid;
  grid_points(region, h, grid, [](const Vec&) { return true; });
  auto one_sided = [&](const Domain& from, const Domain& to) {
    double sup = 0.0;
    auto visit = [&](const Vec& x) { sup = std::max(sup, std::max(0.0, -signed_distance(to, x))); };
    for (const auto& x : grid) {
      if (signed_distance(from, x) >= 0.0) visit(x);
    }
    for (const auto& x : sample_boundary(from, region, h)) visit(x);
    return sup;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

MonotoneReport monotone_implies_weak(const DomainSequence& seq, MonotoneDirection direction,
                                     const ProbeSet& probes, int max_index) {
  require_index(max_index, "monotone_implies_weak");
  const auto pts = probes.points();
  constexpr double kTol = 1e-12;
  auto check_inclusion = [&](const Domain& inner, const Domain& outer, int n, const char* what) {
    for (const auto& x : pts) {
      const double pin = signed_distance(inner, x);
      const double pout = signed_distance(outer, x);
      const bool bad = direction == MonotoneDirection::kIncreasing ? (pin > kTol && pout <= -kTol)
                                                                   : (pin >= kTol && pout < -kTol);
      if (bad) {
        fail(ErrorCode::kNotMonotone, std::string(what) + " fails at n = " + std::to_string(n));
      }
    }
  };
  MonotoneReport report;
  for (int n = 1; n <= max_index; ++n) {
    const Domain dn = seq.at(n);
    if (direction == MonotoneDirection::kIncreasing) {
      if (n < max_index) check_inclusion(dn, seq.at(n + 1), n, "inclusion D_n c D_{n+1}");
      check_inclusion(dn, seq.limit, n, "inclusion D_n c D_0");
    } else {
      if (n < max_index) check_inclusion(seq.at(n + 1), dn, n, "inclusion cl D_{n+1} c cl D_n");
      check_inclusion(seq.limit, dn, n, "inclusion cl D_0 c cl D_n");
    }
    report.gaps.push_back(weak_convergence_gap(seq, n, probes));
    if (n > 1 && report.gaps[n - 1] > report.gaps[n - 2] + kTol) report.violations.push_back(n);
  }
  const double first = report.gaps.front();
  const double last = report.gaps.back();
  report.converging = report.violations.empty() && (last <= kTol || last < first);
  return report;
}

double exceptional_set_condition_b(const DomainSequence& seq, int n, const ProbeSet& k) {
  require_index(n, "exceptional_set_condition_b");
  const Domain dn = seq.at(n);
  const Box box = k.bounding_box();
  const double h = k.h > 0.0 ? k.h : 0.01;
  double worst = 0.0;
  for (const auto& v : sample_exceptional_set(dn, box, h)) {
    if (k.region == ProbeSet::Region::kBall && (v - k.center).norm() > k.radius) continue;
    worst = std::max(worst, exceptional_set_distance(seq.limit, v));
  }
  return worst;
}

// --- field sequences ---

FieldSequence FieldSequence::drift(std::function<DriftField(int)> fields) {
  return FieldSequence{Kind::kDrift, [fields = std::move(fields)](int n, const Domain&, const Vec& z) {
                         return fields(n)(z);
                       }};
}

FieldSequence FieldSequence::covariance(std::function<CovarianceField(int)> fields) {
  return FieldSequence{Kind::kCovariance,
                       [fields = std::move(fields)](int n, const Domain&, const Vec& z) {
                         return flatten(fields(n)(z));
                       }};
}

FieldSequence FieldSequence::reflection(std::function<ReflectionField(int)> fields) {
  return FieldSequence{Kind::kReflection,
                       [fields = std::move(fields)](int n, const Domain& d, const Vec& z) {
                         return fields(n).at(nearest_boundary_point(d, z));
                       }};
}

std::string_view field_kind_name(FieldSequence::Kind kind) noexcept {
  switch (kind) {
    case FieldSequence::Kind::kDrift: return "drift";
    case FieldSequence::Kind::kCovariance: return "covariance";
    case FieldSequence::Kind::kReflection: return "reflection";
  }
  return "unknown";
}

double field_convergence_gap(const FieldSequence& fields, const DomainSequence& seq, int n,
                             const ProbeSet& probes) {
  require_index(n, "field_convergence_gap");
  const Domain dn = seq.at(n);
  const Domain& d0 = seq.limit;
  const double radius = 10.0 * (probes.h > 0.0 ? probes.h : 0.01);
  const bool on_boundary = fields.kind == FieldSequence::Kind::kReflection;
  double gap = 0.0;
  for (const auto& x : probes.points()) {
    Vec z0;
    Vec zn;
    if (on_boundary) {
      try {
        z0 = nearest_boundary_point(d0, x).point;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kAmbiguousProjection || e.code() == ErrorCode::kCenterSingular) continue;
        throw;
      }
      if (exceptional_set_distance(d0, z0) < radius) continue;
      try {
        zn = nearest_boundary_point(dn, z0).point;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kAmbiguousProjection) continue;
        throw;
      }
    } else {
      if (signed_distance(d0, x) < 0.0) continue;
      z0 = x;
      zn = project_onto_closure(dn, x);
    }
    const double moved = (zn - z0).norm();
    if (moved > radius) {
      fail(ErrorCode::kProjectionFailed, "no point of the n = " + std::to_string(n) +
                                             " set within " + std::to_string(radius) +
                                             " of a limit probe (distance " +
                                             std::to_string(moved) + ")");
    }
    gap = std::max(gap, (fields.value(n, dn, zn) - fields.value(0, d0, z0)).norm());
  }
  return gap;
}

int compact_containment_index(const DomainSequence& seq, const ProbeSet& k, int max_index) {
  require_index(max_index, "compact_containment_index");
  auto pts = k.points();
  const auto ext = k.extreme_points();
  pts.insert(pts.end(), ext.begin(), ext.end());
  auto contains = [&](const Domain& d) {
    return std::all_of(pts.begin(), pts.end(), [&](const Vec& x) { return signed_distance(d, x) > 0.0; });
  };
  for (int n = max_index; n >= 1; --n) {
    if (!contains(seq.at(n))) {
      if (n == max_index) {
        fail(ErrorCode::kNotFound, "K is not contained in D_n at the largest tested index " +
                                       std::to_string(max_index));
      }
      return n;
    }
  }
  return 0;
}

}  // namespace reflectolab
