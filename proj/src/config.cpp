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

#include "reflectolab/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <map>
#include <set>

namespace reflectolab {
namespace {

using Node = YAML::Node;

std::pair<int, int> position(const Node& n) {
  if (!n.IsDefined()) return {0, 0};
  const YAML::Mark m = n.Mark();
  if (m.line < 0) return {0, 0};
  return {m.line + 1, m.column + 1};
}

[[noreturn]] void invalid(const Node& at, const std::string& path, const std::string& msg) {
  const auto [line, col] = position(at);
  std::string what = path + ": " + msg;
  if (line > 0) what += " (line " + std::to_string(line) + ", column " + std::to_string(col) + ")";
  throw ConfigError(ErrorCode::kValidationError, path, line, col, what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check_keys(const Node& n, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!n.IsMap()) invalid(n, path, "expected a mapping");
  for (const auto& kv : n) {
    const std::string key = kv.first.Scalar();
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) invalid(kv.first, join(path, key), "unknown key");
  }
}

Node require(const Node& n, const std::string& path, const char* key) {
  Node c = n[key];
  if (!c.IsDefined() || c.IsNull()) invalid(n, join(path, key), "required key is missing");
  return c;
}

double as_double(const Node& n, const std::string& path) {
  if (!n.IsScalar()) invalid(n, path, "expected a number");
  const std::string& s = n.Scalar();
  if (s == ".inf" || s == "+.inf" || s == "inf") return kInf;
  if (s == "-.inf" || s == "-inf") return -kInf;
  double v = 0.0;
  const char* begin = s.data();
  if (!s.empty() && s[0] == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) invalid(n, path, "expected a number, got '" + s + "'");
  return v;
}

long long as_int(const Node& n, const std::string& path) {
  if (!n.IsScalar()) invalid(n, path, "expected an integer");
  const std::string& s = n.Scalar();
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) invalid(n, path, "expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t as_u64(const Node& n, const std::string& path) {
  if (!n.IsScalar()) invalid(n, path, "expected an unsigned integer");
  const std::string& s = n.Scalar();
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    invalid(n, path, "expected an unsigned 64-bit integer, got '" + s + "'");
  }
  return v;
}

bool as_bool(const Node& n, const std::string& path) {
  if (!n.IsScalar()) invalid(n, path, "expected true or false");
  const std::string& s = n.Scalar();
  if (s == "true") return true;
  if (s == "false") return false;
  invalid(n, path, "expected true or false, got '" + s + "'");
}

std::string as_string(const Node& n, const std::string& path) {
  if (!n.IsScalar()) invalid(n, path, "expected a string");
  return n.Scalar();
}

Vec as_vec(const Node& n, const std::string& path, int expected = -1) {
  if (!n.IsSequence()) invalid(n, path, "expected a list of numbers");
  Vec v(static_cast<Eigen::Index>(n.size()));
  for (std::size_t i = 0; i < n.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = as_double(n[i], path + "[" + std::to_string(i) + "]");
  }
  if (expected >= 0 && v.size() != expected) {
    invalid(n, path, "expected " + std::to_string(expected) + " entries, got " + std::to_string(v.size()));
  }
  return v;
}

Mat as_mat(const Node& n, const std::string& path, int rows = -1, int cols = -1) {
  if (!n.IsSequence() || n.size() == 0) invalid(n, path, "expected a non-empty list of rows");
  const Vec first = as_vec(n[0], path + "[0]");
  Mat m(static_cast<Eigen::Index>(n.size()), first.size());
  for (std::size_t r = 0; r < n.size(); ++r) {
    const Vec row = as_vec(n[r], path + "[" + std::to_string(r) + "]", static_cast<int>(first.size()));
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  if (rows >= 0 && m.rows() != rows) invalid(n, path, "expected " + std::to_string(rows) + " rows");
  if (cols >= 0 && m.cols() != cols) invalid(n, path, "expected " + std::to_string(cols) + " columns");
  return m;
}

double positive(const Node& n, const std::string& path) {
  const double v = as_double(n, path);
  if (!(v > 0.0) || !std::isfinite(v)) invalid(n, path, "must be a positive finite number");
  return v;
}

int positive_int(const Node& n, const std::string& path) {
  const long long v = as_int(n, path);
  if (v < 1 || v > 1'000'000'000) invalid(n, path, "must be a positive integer");
  return static_cast<int>(v);
}

// Runs `f`, turning library errors into validation errors at `path`.
template <typename F>
auto guarded(const Node& at, const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    invalid(at, path, std::string(error_code_name(e.code())) + ": " + e.what());
  }
}

// --- domains ---

Domain parse_domain(const Node& n, const std::string& path) {
  if (!n.IsMap()) invalid(n, path, "expected a mapping");
  const std::string kind = as_string(require(n, path, "kind"), join(path, "kind"));
  auto get = [&](const char* key) { return require(n, path, key); };
  if (kind == "polyhedron") {
    check_keys(n, path, {"kind", "normals", "offsets"});
    const Mat normals = as_mat(get("normals"), join(path, "normals"));
    const Vec offsets = as_vec(get("offsets"), join(path, "offsets"), static_cast<int>(normals.rows()));
    return guarded(n, path, [&] { return Domain::polyhedron(normals, offsets); });
  }
  if (kind == "orthant" || kind == "whole_space") {
    check_keys(n, path, {"kind", "dim"});
    const int dim = positive_int(get("dim"), join(path, "dim"));
    return guarded(n, path, [&] { return kind == "orthant" ? Domain::orthant(dim) : Domain::whole_space(dim); });
  }
  if (kind == "ball" || kind == "ball_complement") {
    check_keys(n, path, {"kind", "center", "radius"});
    const Vec c = as_vec(get("center"), join(path, "center"));
    const double r = as_double(get("radius"), join(path, "radius"));
    return guarded(n, path, [&] { return kind == "ball" ? Domain::ball(c, r) : Domain::ball_complement(c, r); });
  }
  if (kind == "half_space") {
    check_keys(n, path, {"kind", "normal", "offset"});
    const Vec normal = as_vec(get("normal"), join(path, "normal"));
    const double offset = n["offset"] ? as_double(n["offset"], join(path, "offset")) : 0.0;
    return guarded(n, path, [&] { return Domain::half_space(normal, offset); });
  }
  if (kind == "punctured_space") {
    check_keys(n, path, {"kind", "dim", "excluded"});
    const int dim = positive_int(get("dim"), join(path, "dim"));
    const Node ex = get("excluded");
    if (!ex.IsSequence()) invalid(ex, join(path, "excluded"), "expected a list");
    std::vector<AffineComponent> comps;
    for (std::size_t i = 0; i < ex.size(); ++i) {
      const std::string p = join(path, "excluded") + "[" + std::to_string(i) + "]";
      check_keys(ex[i], p, {"point", "directions"});
      AffineComponent c;
      c.point = as_vec(require(ex[i], p, "point"), join(p, "point"), dim);
      c.directions = Mat(dim, 0);
      if (ex[i]["directions"] && ex[i]["directions"].size() > 0) {
        c.directions = as_mat(ex[i]["directions"], join(p, "directions"), -1, dim).transpose();
      }
      comps.push_back(std::move(c));
    }
    return guarded(n, path, [&] { return Domain::punctured_space(dim, comps); });
  }
  if (kind == "notched_half_plane") {
    check_keys(n, path, {"kind", "left", "right", "height"});
    const double l = as_double(get("left"), join(path, "left"));
    const double r = as_double(get("right"), join(path, "right"));
    const double h = as_double(get("height"), join(path, "height"));
    return guarded(n, path, [&] { return Domain::notched_half_plane(l, r, h); });
  }
  invalid(n["kind"], join(path, "kind"), "unknown domain kind '" + kind + "'");
}

// --- diffusion ---

DriftField parse_drift(const Node& n, const std::string& path, int dim) {
  if (n.IsSequence()) return DriftField::constant(as_vec(n, path, dim));
  check_keys(n, path, {"offset", "linear"});
  const Vec offset = n["offset"] ? as_vec(n["offset"], join(path, "offset"), dim) : Vec::Zero(dim);
  const Mat linear = n["linear"] ? as_mat(n["linear"], join(path, "linear"), dim, dim) : Mat::Zero(dim, dim);
  return DriftField::affine(offset, linear);
}

CovarianceField parse_covariance(const Node& n, const std::string& path, int dim) {
  if (n.IsScalar()) {
    if (n.Scalar() != "identity") invalid(n, path, "expected 'identity' or a matrix");
    return CovarianceField::identity(dim);
  }
  const Mat a = as_mat(n, path, dim, dim);
  return guarded(n, path, [&] {
    validate_covariance(a, "covariance");
    return CovarianceField::constant(a);
  });
}

ReflectionField parse_reflection(const Node& n, const std::string& path, int dim) {
  if (n.IsScalar()) {
    if (n.Scalar() != "normal") invalid(n, path, "expected 'normal' or a mapping");
    return ReflectionField::normal();
  }
  check_keys(n, path, {"direction", "matrix", "angle"});
  if (n.size() != 1) invalid(n, path, "give exactly one of direction, matrix, angle");
  if (n["direction"]) {
    const Vec v = as_vec(n["direction"], join(path, "direction"), dim);
    return guarded(n, path, [&] { return ReflectionField::constant(v); });
  }
  if (n["matrix"]) {
    const Mat m = as_mat(n["matrix"], join(path, "matrix"), dim);
    return guarded(n, path, [&] { return ReflectionField::matrix(m); });
  }
  const double a = as_double(n["angle"], join(path, "angle"));
  return guarded(n, path, [&] { return ReflectionField::rotated(a); });
}

DiffusionSpec parse_diffusion(const Node& n, const std::string& path, const Domain& domain) {
  check_keys(n, path, {"start", "drift", "covariance", "reflection"});
  const int d = domain.dim();
  DiffusionSpec s = brownian_spec(as_vec(require(n, path, "start"), join(path, "start"), d));
  if (n["drift"]) s.drift = parse_drift(n["drift"], join(path, "drift"), d);
  if (n["covariance"]) s.covariance = parse_covariance(n["covariance"], join(path, "covariance"), d);
  if (n["reflection"]) s.reflection = parse_reflection(n["reflection"], join(path, "reflection"), d);
  guarded(n, path, [&] {
    s.validate(domain);
    return 0;
  });
  return s;
}

// --- simulation, probes ---

void parse_simulation(const Node& n, const std::string& path, RunConfigFile& out) {
  check_keys(n, path, {"horizon", "dt", "paths", "exceptional_collar", "max_halvings",
                       "lcp_tolerance", "lcp_max_sweeps"});
  SimulationOptions& o = out.simulation;
  if (n["horizon"]) o.horizon = positive(n["horizon"], join(path, "horizon"));
  if (n["dt"]) o.dt = positive(n["dt"], join(path, "dt"));
  if (n["paths"]) out.paths = static_cast<std::size_t>(positive_int(n["paths"], join(path, "paths")));
  if (n["exceptional_collar"]) {
    o.exceptional_collar = as_double(n["exceptional_collar"], join(path, "exceptional_collar"));
  }
  if (n["max_halvings"]) o.max_halvings = static_cast<int>(as_int(n["max_halvings"], join(path, "max_halvings")));
  if (n["lcp_tolerance"]) o.lcp_tolerance = positive(n["lcp_tolerance"], join(path, "lcp_tolerance"));
  if (n["lcp_max_sweeps"]) o.lcp_max_sweeps = positive_int(n["lcp_max_sweeps"], join(path, "lcp_max_sweeps"));
  guarded(n, path, [&] {
    o.validate();
    return 0;
  });
}

ProbeSet parse_probes(const Node& n, const std::string& path, int dim) {
  check_keys(n, path, {"box", "ball", "h", "points"});
  const double h = n["h"] ? positive(n["h"], join(path, "h")) : 0.01;
  if (n["box"] && n["ball"]) invalid(n, path, "give either box or ball, not both");
  ProbeSet p;
  if (n["box"]) {
    const std::string bp = join(path, "box");
    check_keys(n["box"], bp, {"lo", "hi"});
    const Vec lo = as_vec(require(n["box"], bp, "lo"), join(bp, "lo"), dim);
    const Vec hi = as_vec(require(n["box"], bp, "hi"), join(bp, "hi"), dim);
    p = guarded(n["box"], bp, [&] { return ProbeSet::box_grid(lo, hi, h); });
  } else if (n["ball"]) {
    const std::string bp = join(path, "ball");
    check_keys(n["ball"], bp, {"center", "radius"});
    const Vec c = as_vec(require(n["ball"], bp, "center"), join(bp, "center"), dim);
    const double r = as_double(require(n["ball"], bp, "radius"), join(bp, "radius"));
    p = guarded(n["ball"], bp, [&] { return ProbeSet::ball_grid(c, r, h); });
  } else {
    p.h = h;
  }
  if (n["points"]) {
    const Node pts = n["points"];
    if (!pts.IsSequence()) invalid(pts, join(path, "points"), "expected a list of points");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      p.extra.push_back(as_vec(pts[i], join(path, "points") + "[" + std::to_string(i) + "]", dim));
    }
  }
  if (p.dim() == 0) invalid(n, path, "give a box, a ball or explicit points");
  return p;
}

// --- families ---

struct Family {
  DomainSequence seq;
  std::function<double(int)> angle;  // rotating families only
};

std::function<double(int)> angle_schedule(const Node& n, const std::string& path) {
  const double scale = n["angle"] ? as_double(n["angle"], join(path, "angle")) : 1.0;
  const std::string schedule = n["schedule"] ? as_string(n["schedule"], join(path, "schedule")) : "geometric";
  if (!std::isfinite(scale) || std::abs(scale) >= 1.5) invalid(n, join(path, "angle"), "must satisfy |angle| < 1.5");
  if (schedule == "geometric") return [scale](int k) { return scale * std::ldexp(1.0, -k); };
  if (schedule == "harmonic") return [scale](int k) { return scale / k; };
  invalid(n["schedule"], join(path, "schedule"), "expected geometric or harmonic");
}

Family parse_family(const Node& n, const std::string& path) {
  if (!n.IsMap()) invalid(n, path, "expected a mapping");
  const std::string kind = as_string(require(n, path, "kind"), join(path, "kind"));
  Family f;
  if (kind == "constant") {
    check_keys(n, path, {"kind", "domain"});
    f.seq = sequences::constant(parse_domain(require(n, path, "domain"), join(path, "domain")));
  } else if (kind == "balls") {
    check_keys(n, path, {"kind", "center", "radius", "center_rate", "radius_rate"});
    const Vec c = as_vec(require(n, path, "center"), join(path, "center"));
    const int d = static_cast<int>(c.size());
    const double r = positive(require(n, path, "radius"), join(path, "radius"));
    const Vec cr = n["center_rate"] ? as_vec(n["center_rate"], join(path, "center_rate"), d) : Vec::Zero(d);
    const double rr = n["radius_rate"] ? as_double(n["radius_rate"], join(path, "radius_rate")) : 0.0;
    if (r + std::min(rr, 0.0) <= 0.0) invalid(n, join(path, "radius_rate"), "radius + radius_rate must stay positive");
    f.seq = sequences::balls([c, cr](int k) -> Vec { return c + cr / k; },
                             [r, rr](int k) { return r + rr / k; }, Domain::ball(c, r));
  } else if (kind == "expanding_balls" || kind == "tangent_balls" || kind == "shrinking_holes") {
    check_keys(n, path, {"kind", "dim"});
    const int d = positive_int(require(n, path, "dim"), join(path, "dim"));
    f.seq = guarded(n, path, [&] {
      if (kind == "expanding_balls") return sequences::expanding_balls(d);
      if (kind == "tangent_balls") return sequences::tangent_balls(d);
      return sequences::shrinking_holes(d);
    });
  } else if (kind == "slit") {
    check_keys(n, path, {"kind"});
    f.seq = sequences::slit();
  } else if (kind == "rotating_quadrant" || kind == "flattening_wedge") {
    check_keys(n, path, {"kind", "angle", "schedule"});
    f.angle = angle_schedule(n, path);
    f.seq = kind == "rotating_quadrant" ? sequences::rotating_quadrant(f.angle)
                                        : sequences::flattening_wedge(f.angle);
  } else if (kind == "shifted_polyhedron") {
    check_keys(n, path, {"kind", "base", "shift"});
    const Domain base = parse_domain(require(n, path, "base"), join(path, "base"));
    const Polyhedron* p = base.as_polyhedron();
    if (!p) invalid(n["base"], join(path, "base"), "must be a polyhedron or orthant");
    const Vec shift = as_vec(require(n, path, "shift"), join(path, "shift"), static_cast<int>(p->offsets.size()));
    f.seq = sequences::shifted_polyhedron(*p, shift);
  } else {
    invalid(n["kind"], join(path, "kind"), "unknown family '" + kind + "'");
  }
  return f;
}

std::vector<int> parse_indices(const Node& n, const std::string& path) {
  if (!n.IsSequence() || n.size() == 0) invalid(n, path, "expected a non-empty list of indices");
  std::vector<int> out;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const int v = positive_int(n[i], path + "[" + std::to_string(i) + "]");
    if (!out.empty() && v <= out.back()) invalid(n[i], path, "indices must increase strictly");
    out.push_back(v);
  }
  return out;
}

// --- commands ---

GeometryCheckConfig parse_geometry(const Node& n, const std::string& path, int dim) {
  check_keys(n, path, {"probes", "boundary_h", "collar"});
  GeometryCheckConfig g;
  g.probes = parse_probes(require(n, path, "probes"), join(path, "probes"), dim);
  if (n["boundary_h"]) g.boundary_h = positive(n["boundary_h"], join(path, "boundary_h"));
  if (n["collar"]) g.collar = as_double(n["collar"], join(path, "collar"));
  return g;
}

ConvergenceConfig parse_convergence(const Node& n, const std::string& path) {
  check_keys(n, path, {"family", "indices", "probes", "metrics", "hausdorff"});
  ConvergenceConfig c;
  c.family = parse_family(require(n, path, "family"), join(path, "family")).seq;
  if (n["indices"]) c.indices = parse_indices(n["indices"], join(path, "indices"));
  c.probes = parse_probes(require(n, path, "probes"), join(path, "probes"), c.family.dim());
  if (n["metrics"]) {
    const Node m = n["metrics"];
    if (!m.IsSequence() || m.size() == 0) invalid(m, join(path, "metrics"), "expected a non-empty list");
    c.metrics.clear();
    static const std::map<std::string, ConvergenceMetric> names{
        {"weak", ConvergenceMetric::kWeak},
        {"wijsman_boundary", ConvergenceMetric::kWijsmanBoundary},
        {"wijsman_domain", ConvergenceMetric::kWijsmanDomain},
        {"wijsman_complement", ConvergenceMetric::kWijsmanComplement},
        {"hausdorff", ConvergenceMetric::kHausdorff},
        {"condition_b", ConvergenceMetric::kConditionB}};
    for (std::size_t i = 0; i < m.size(); ++i) {
      const std::string s = as_string(m[i], join(path, "metrics"));
      const auto it = names.find(s);
      if (it == names.end()) invalid(m[i], join(path, "metrics"), "unknown metric '" + s + "'");
      c.metrics.push_back(it->second);
    }
  }
  if (n["hausdorff"]) {
    const Node h = n["hausdorff"];
    const std::string hp = join(path, "hausdorff");
    check_keys(h, hp, {"lo", "hi", "h"});
    const int d = c.family.dim();
    if (h["lo"] || h["hi"]) {
      c.hausdorff_box = Box{as_vec(require(h, hp, "lo"), join(hp, "lo"), d),
                            as_vec(require(h, hp, "hi"), join(hp, "hi"), d)};
    }
    if (h["h"]) c.hausdorff_h = positive(h["h"], join(hp, "h"));
  }
  return c;
}

ExperimentSpec parse_experiment(const Node& n, const std::string& path,
                                const RunConfigFile& file) {
  check_keys(n, path, {"name", "theorem", "limit_kind", "family", "diffusion", "perturbation",
                       "indices", "probes", "band", "coupling", "modulus_delta",
                       "containment_radius", "unsound_override", "energy_cap"});
  ExperimentSpec spec;
  if (n["name"]) spec.name = as_string(n["name"], join(path, "name"));
  const std::string theorem = as_string(require(n, path, "theorem"), join(path, "theorem"));
  if (theorem == "domain_sequence") {
    spec.theorem = Theorem::kDomainSequence;
  } else if (theorem == "polyhedral") {
    spec.theorem = Theorem::kPolyhedral;
  } else if (theorem == "expanding") {
    spec.theorem = Theorem::kExpanding;
  } else if (theorem == "punctured") {
    spec.theorem = Theorem::kPunctured;
  } else {
    invalid(n["theorem"], join(path, "theorem"), "expected domain_sequence, polyhedral, expanding or punctured");
  }
  const Family family = parse_family(require(n, path, "family"), join(path, "family"));
  spec.domains = family.seq;
  const Domain& limit = spec.domains.limit;
  const int d = limit.dim();
  const bool free_limit = limit.kind() == DomainKind::kWholeSpace || limit.kind() == DomainKind::kPuncturedSpace;
  spec.limit_kind = free_limit ? LimitKind::kNonReflected : LimitKind::kReflected;
  if (n["limit_kind"]) {
    const std::string k = as_string(n["limit_kind"], join(path, "limit_kind"));
    if (k == "reflected") {
      spec.limit_kind = LimitKind::kReflected;
    } else if (k == "non_reflected") {
      spec.limit_kind = LimitKind::kNonReflected;
    } else {
      invalid(n["limit_kind"], join(path, "limit_kind"), "expected reflected or non_reflected");
    }
  }
  // The limit problem is validated on R^d for free limits: z_0 may be any
  // point off the excluded set.
  const Node dn = require(n, path, "diffusion");
  const DiffusionSpec base = parse_diffusion(dn, join(path, "diffusion"),
                                             free_limit ? Domain::whole_space(d) : limit);

  struct Perturbation {
    std::optional<Vec> drift;
    std::optional<Mat> covariance;
    std::optional<Mat> reflection;
    std::optional<Vec> start;
    bool rotate_reflection = false;
  } pert;
  if (n["perturbation"]) {
    const Node p = n["perturbation"];
    const std::string pp = join(path, "perturbation");
    check_keys(p, pp, {"drift", "covariance", "reflection", "start", "rotate_reflection"});
    if (p["drift"]) {
      pert.drift = as_vec(p["drift"], join(pp, "drift"), d);
      if (base.drift.is_custom()) invalid(p["drift"], join(pp, "drift"), "needs a constant or affine drift");
    }
    if (p["covariance"]) {
      pert.covariance = as_mat(p["covariance"], join(pp, "covariance"), d, d);
      if (!base.covariance.is_constant()) invalid(p["covariance"], join(pp, "covariance"), "needs a constant covariance");
    }
    if (p["reflection"]) {
      if (base.reflection.kind() != ReflectionField::Kind::kMatrix) {
        invalid(p["reflection"], join(pp, "reflection"), "needs a matrix reflection in the diffusion block");
      }
      pert.reflection = as_mat(p["reflection"], join(pp, "reflection"), d,
                               static_cast<int>(base.reflection.columns().cols()));
    }
    if (p["start"]) pert.start = as_vec(p["start"], join(pp, "start"), d);
    if (p["rotate_reflection"]) {
      pert.rotate_reflection = as_bool(p["rotate_reflection"], join(pp, "rotate_reflection"));
      if (pert.rotate_reflection && (!family.angle || base.reflection.kind() != ReflectionField::Kind::kMatrix)) {
        invalid(p["rotate_reflection"], join(pp, "rotate_reflection"),
                "needs a rotating family and a matrix reflection");
      }
    }
  }
  const auto angle = family.angle;
  auto build = [base, pert, angle](int k) {
    DiffusionSpec s = base;
    if (k == 0) return s;
    const double inv = 1.0 / k;
    if (pert.drift) {
      const Vec offset = base.drift.offset() + inv * *pert.drift;
      s.drift = base.drift.is_constant() ? DriftField::constant(offset)
                                         : DriftField::affine(offset, base.drift.linear());
    }
    if (pert.covariance) s.covariance = CovarianceField::constant(base.covariance.constant_value() + inv * *pert.covariance);
    if (pert.reflection || pert.rotate_reflection) {
      Mat r = base.reflection.columns();
      if (pert.reflection) r += inv * *pert.reflection;
      if (pert.rotate_reflection) {
        const double a = angle(k);
        Mat rot(2, 2);
        rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
        r = rot * r;
      }
      s.reflection = ReflectionField::matrix(r);
    }
    if (pert.start) s.start = base.start + inv * *pert.start;
    return s;
  };

  if (n["indices"]) spec.indices = parse_indices(n["indices"], join(path, "indices"));
  auto cache = std::make_shared<std::map<int, DiffusionSpec>>();
  (*cache)[0] = base;
  for (int k : spec.indices) {
    const std::string where = path + " (index " + std::to_string(k) + ")";
    (*cache)[k] = guarded(n, where, [&] {
      DiffusionSpec s = build(k);
      s.validate(spec.domains.at(k));
      return s;
    });
  }
  spec.problem = [cache, build](int k) {
    const auto it = cache->find(k);
    return it != cache->end() ? it->second : build(k);
  };

  spec.simulation = file.simulation;
  spec.paths = file.paths;
  if (file.seed) spec.seed = *file.seed;
  if (file.threads) spec.threads = *file.threads;
  if (n["probes"]) {
    spec.probes = parse_probes(n["probes"], join(path, "probes"), d);
  } else {
    spec.probes = ProbeSet::box_grid(Vec::Constant(d, -2.0), Vec::Constant(d, 2.0), 0.05);
  }
  if (n["band"]) {
    const Node b = n["band"];
    const std::string bp = join(path, "band");
    check_keys(b, bp, {"splits", "quantile", "cap"});
    if (b["splits"]) spec.band_splits = positive_int(b["splits"], join(bp, "splits"));
    if (b["quantile"]) spec.band_quantile = as_double(b["quantile"], join(bp, "quantile"));
    if (b["cap"]) spec.band_cap = positive(b["cap"], join(bp, "cap"));
  }
  if (n["coupling"]) {
    const std::string c = as_string(n["coupling"], join(path, "coupling"));
    if (c == "common") {
      spec.coupling = Coupling::kCommon;
    } else if (c == "independent") {
      spec.coupling = Coupling::kIndependent;
    } else {
      invalid(n["coupling"], join(path, "coupling"), "expected common or independent");
    }
  }
  if (n["modulus_delta"]) spec.modulus_delta = as_double(n["modulus_delta"], join(path, "modulus_delta"));
  if (n["containment_radius"]) {
    spec.containment_radius = as_double(n["containment_radius"], join(path, "containment_radius"));
  }
  if (n["unsound_override"]) spec.unsound_override = as_bool(n["unsound_override"], join(path, "unsound_override"));
  if (n["energy_cap"]) spec.energy_cap = static_cast<std::size_t>(positive_int(n["energy_cap"], join(path, "energy_cap")));
  guarded(n, path, [&] {
    spec.validate();
    return 0;
  });
  return spec;
}

}  // namespace

ConfigError::ConfigError(ErrorCode code, std::string key_path, int line, int column,
                         const std::string& what)
    : Error(code, what), key_path_(std::move(key_path)), line_(line), column_(column) {}

std::string_view convergence_metric_name(ConvergenceMetric m) noexcept {
  switch (m) {
    case ConvergenceMetric::kWeak: return "weak";
    case ConvergenceMetric::kWijsmanBoundary: return "wijsman_boundary";
    case ConvergenceMetric::kWijsmanDomain: return "wijsman_domain";
    case ConvergenceMetric::kWijsmanComplement: return "wijsman_complement";
    case ConvergenceMetric::kHausdorff: return "hausdorff";
    case ConvergenceMetric::kConditionB: return "condition_b";
  }
  return "unknown";
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

RunConfigFile parse_config(std::string_view text) {
  Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    const int line = e.mark.line >= 0 ? e.mark.line + 1 : 0;
    const int col = e.mark.column >= 0 ? e.mark.column + 1 : 0;
    throw ConfigError(ErrorCode::kParseError, "", line, col,
                      "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.msg);
  }
  if (!root.IsDefined() || root.IsNull()) invalid(root, "<root>", "configuration is empty");
  check_keys(root, "", {"command", "seed", "threads", "domain", "diffusion", "simulation",
                        "geometry", "convergence", "experiment"});
  RunConfigFile out;
  if (root["command"]) {
    const std::string c = as_string(root["command"], "command");
    static const std::set<std::string> known{"simulate", "geometry-check", "domain-convergence",
                                             "hitting-check", "experiment"};
    if (!known.count(c)) invalid(root["command"], "command", "unknown command '" + c + "'");
    out.command = c;
  }
  if (root["seed"]) out.seed = as_u64(root["seed"], "seed");
  if (root["threads"]) out.threads = static_cast<unsigned>(positive_int(root["threads"], "threads"));
  if (root["simulation"]) parse_simulation(root["simulation"], "simulation", out);
  if (root["domain"]) out.domain = parse_domain(root["domain"], "domain");
  if (root["diffusion"]) {
    if (!out.domain) invalid(root["diffusion"], "diffusion", "needs a domain section");
    out.diffusion = parse_diffusion(root["diffusion"], "diffusion", *out.domain);
  }
  if (root["geometry"]) {
    if (!out.domain) invalid(root["geometry"], "geometry", "needs a domain section");
    out.geometry = parse_geometry(root["geometry"], "geometry", out.domain->dim());
  }
  if (root["convergence"]) out.convergence = parse_convergence(root["convergence"], "convergence");
  if (root["experiment"]) out.experiment = parse_experiment(root["experiment"], "experiment", out);
  return out;
}

}  // namespace reflectolab
