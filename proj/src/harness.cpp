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

#include "reflectolab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>

#include "json.hpp"
#include "reflectolab/rng.hpp"

namespace reflectolab {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::uint64_t kShared = 0x5EEDull;
constexpr std::uint64_t kReplicate = 0xB0B0B0B0ull;
constexpr std::uint64_t kPermutations = 0xBA4Dull;
constexpr std::size_t kLocalTimeSlot = 3;

bool shrinks(const std::vector<double>& v) {
  if (v.empty()) return true;
  const double last = v.back();
  if (last <= 1e-9) return true;
  if (!std::isfinite(last) || v.size() < 2) return false;
  return last <= 0.5 * v.front();
}

Diagnostic make_diagnostic(std::string name, std::vector<double> values, std::string note = {}) {
  Diagnostic d{std::move(name), std::move(values), true, std::move(note)};
  d.shrinking = shrinks(d.values);
  return d;
}

Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

bool counts_toward_verdict(LimitKind kind, std::size_t f) {
  return !(kind == LimitKind::kNonReflected && f == kLocalTimeSlot);
}

std::uint64_t ensemble_seed(const ExperimentSpec& spec, int index) {
  if (spec.coupling == Coupling::kCommon) return derive_seed(spec.seed, kShared);
  return derive_seed(spec.seed, static_cast<std::uint64_t>(index) + 1);
}

Domain simulation_domain(const ExperimentSpec& spec, int index) {
  if (index == 0 && spec.limit_kind == LimitKind::kNonReflected) {
    return Domain::whole_space(spec.dim());
  }
  return spec.domains.at(index);
}

DiffusionSpec simulation_problem(const ExperimentSpec& spec, int index) {
  DiffusionSpec p = spec.problem(index);
  if (index == 0 && spec.limit_kind == LimitKind::kNonReflected) {
    p.reflection = ReflectionField::normal();
  }
  return p;
}

Mat column(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string_view theorem_name(Theorem t) noexcept {
  switch (t) {
    case Theorem::kDomainSequence: return "domain_sequence";
    case Theorem::kPolyhedral: return "polyhedral";
    case Theorem::kExpanding: return "expanding";
    case Theorem::kPunctured: return "punctured";
  }
  return "unknown";
}

double modulus_of_continuity(const PathSample& path, double delta) {
  if (!(delta >= 0.0)) fail(ErrorCode::kInvalidArgument, "modulus delta must be >= 0");
  const std::size_t n = path.size();
  if (n < 2 || path.dt <= 0.0) return 0.0;
  const auto window = static_cast<std::size_t>(std::floor(delta / path.dt + 1e-9));
  const auto d = static_cast<std::size_t>(path.dim);
  double best = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t stop = std::min(n - 1, k + window);
    for (std::size_t j = k + 1; j <= stop; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double diff = path.states[j * d + i] - path.states[k * d + i];
        s += diff * diff;
      }
      best = std::max(best, s);
    }
  }
  return std::sqrt(best);
}

PathFunctionals path_functionals(const PathSample& path, double modulus_delta) {
  if (path.size() == 0) fail(ErrorCode::kInvalidArgument, "empty path");
  PathFunctionals f;
  f.terminal = path.state_vec(path.size() - 1);
  double sup = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    double s = 0.0;
    for (double v : path.state(k)) s += v * v;
    sup = std::max(sup, s);
  }
  f.sup_norm = std::sqrt(sup);
  f.local_time = path.local_time.back();
  f.modulus = modulus_of_continuity(path, modulus_delta);
  f.stopped = path.stopped();
  return f;
}

void ExperimentSpec::validate() const {
  auto invalid = [](const std::string& key, const std::string& why) {
    fail(ErrorCode::kValidationError, key + ": " + why);
  };
  if (!domains.member) invalid("domains", "sequence generator missing");
  if (!problem) invalid("problem", "problem generator missing");
  if (indices.empty()) invalid("indices", "at least one index is required");
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 1) invalid("indices", "indices must be >= 1");
    if (i > 0 && indices[i] <= indices[i - 1]) invalid("indices", "indices must increase strictly");
  }
  if (paths < 2) invalid("paths", "need at least 2 paths");
  if (band_splits < 1) invalid("band.splits", "need at least one split");
  if (!(band_quantile > 0.0 && band_quantile < 1.0)) invalid("band.quantile", "must lie in (0, 1)");
  if (!(band_cap > 0.0)) invalid("band.cap", "must be positive");
  if (!(modulus_delta >= 0.0)) invalid("modulus_delta", "must be >= 0");
  if (!(containment_radius >= 0.0)) invalid("containment_radius", "must be >= 0");
  simulation.validate();
  if (probes.dim() != dim()) invalid("probes", "dimension differs from the domain");
  const DomainKind limit = domains.limit.kind();
  const bool free_limit = limit == DomainKind::kWholeSpace || limit == DomainKind::kPuncturedSpace;
  if (limit_kind == LimitKind::kNonReflected && !free_limit) {
    invalid("limit_kind", "a non-reflected limit needs the whole space or a punctured space");
  }
  if (limit_kind == LimitKind::kReflected && free_limit) {
    invalid("limit_kind", "the whole or punctured space has no reflecting boundary");
  }
  const DiffusionSpec z0 = problem(0);
  if (static_cast<int>(z0.start.size()) != dim()) invalid("start", "dimension differs from the domain");
  switch (theorem) {
    case Theorem::kDomainSequence:
      break;
    case Theorem::kPolyhedral:
      if (limit != DomainKind::kPolyhedron) invalid("domain", "polyhedral experiments need polyhedra");
      break;
    case Theorem::kExpanding:
      if (limit != DomainKind::kWholeSpace) invalid("domain", "expanding experiments need the whole space as limit");
      break;
    case Theorem::kPunctured: {
      if (limit != DomainKind::kPuncturedSpace) invalid("domain", "punctured experiments need a punctured limit");
      if (dim() < 2) invalid("dim", "the excluded set must have codimension >= 2");
      if (signed_distance(domains.limit, z0.start) <= 0.0) invalid("start", "z_0 lies on the excluded set");
      break;
    }
  }
}

FunctionalSamples collect_functionals(const Domain& domain, const DiffusionSpec& spec,
                                      const SimulationOptions& options, std::size_t count,
                                      std::uint64_t base_seed, unsigned threads,
                                      double modulus_delta) {
  const auto d = static_cast<std::size_t>(domain.dim());
  std::vector<double> terminal(count * d);
  std::vector<double> sup(count), lt(count), mod(count), residual(count);
  std::vector<char> stopped(count);
  std::vector<std::size_t> events(count);
  for_each_path(domain, spec, options, count, base_seed, threads,
                [&](std::size_t i, PathSample&& path) {
                  const PathFunctionals f = path_functionals(path, modulus_delta);
                  for (std::size_t c = 0; c < d; ++c) terminal[i * d + c] = f.terminal(static_cast<Eigen::Index>(c));
                  sup[i] = f.sup_norm;
                  lt[i] = f.local_time;
                  mod[i] = f.modulus;
                  stopped[i] = f.stopped ? 1 : 0;
                  events[i] = path.correction_events;
                  residual[i] = path.max_residual;
                });
  FunctionalSamples out;
  out.total = count;
  for (std::size_t i = 0; i < count; ++i) {
    out.correction_events += events[i];
    out.max_residual = std::max(out.max_residual, residual[i]);
    if (stopped[i]) {
      ++out.stopped;
      continue;
    }
    out.path_ids.push_back(i);
    out.sup_norm.push_back(sup[i]);
    out.local_time.push_back(lt[i]);
    out.modulus.push_back(mod[i]);
    if (lt[i] > 0.0) ++out.with_local_time;
  }
  out.terminal.resize(static_cast<Eigen::Index>(out.kept()), static_cast<Eigen::Index>(d));
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (stopped[i]) continue;
    for (std::size_t c = 0; c < d; ++c) out.terminal(row, static_cast<Eigen::Index>(c)) = terminal[i * d + c];
    ++row;
  }
  return out;
}

std::array<double, kFunctionalCount> functional_distances(const FunctionalSamples& a,
                                                          const FunctionalSamples& b,
                                                          std::size_t energy_cap) {
  if (a.kept() == 0 || b.kept() == 0) {
    fail(ErrorCode::kSimulationFailed, "every path of an ensemble stopped at the exceptional set");
  }
  return {two_sample_distance(a.terminal, b.terminal, DistanceKind::kKsPerCoordinate),
          two_sample_distance(a.terminal, b.terminal, DistanceKind::kEnergy, energy_cap),
          ks_two_sample(a.sup_norm, b.sup_norm), ks_two_sample(a.local_time, b.local_time),
          ks_two_sample(a.modulus, b.modulus)};
}

std::vector<Diagnostic> hypothesis_diagnostics(const ExperimentSpec& spec) {
  std::vector<Diagnostic> out;
  const auto& idx = spec.indices;
  std::map<int, DiffusionSpec> problems;
  problems.emplace(0, spec.problem(0));
  for (int n : idx) problems.emplace(n, spec.problem(n));
  const DiffusionSpec& limit = problems.at(0);
  auto along = [&](const std::function<double(int)>& f) {
    std::vector<double> v;
    for (int n : idx) v.push_back(f(n));
    return v;
  };
  out.push_back(make_diagnostic("weak_gap", along([&](int n) {
                                  return weak_convergence_gap(spec.domains, n, spec.probes);
                                })));
  out.push_back(make_diagnostic("start_gap", along([&](int n) {
                                  return (problems.at(n).start - limit.start).norm();
                                })));
  auto field_gap = [&](const FieldSequence& f) {
    return along([&](int n) {
      try {
        return field_convergence_gap(f, spec.domains, n, spec.probes);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kProjectionFailed) return kInf;
        throw;
      }
    });
  };
  out.push_back(make_diagnostic(
      "drift_gap", field_gap(FieldSequence::drift([&](int n) { return problems.at(n).drift; }))));
  out.push_back(make_diagnostic(
      "covariance_gap",
      field_gap(FieldSequence::covariance([&](int n) { return problems.at(n).covariance; }))));
  if (spec.limit_kind == LimitKind::kReflected) {
    out.push_back(make_diagnostic(
        "reflection_gap",
        field_gap(FieldSequence::reflection([&](int n) { return problems.at(n).reflection; }))));
    out.push_back(make_diagnostic("condition_b", along([&](int n) {
                                    return exceptional_set_condition_b(spec.domains, n, spec.probes);
                                  })));
  }
  if (spec.theorem == Theorem::kPolyhedral) {
    const Polyhedron* p0 = spec.domains.limit.as_polyhedron();
    const Mat r0 = limit.reflection.polyhedron_matrix(*p0);
    std::vector<double> normal_gap, offset_gap, column_gap;
    for (int n : idx) {
      const Domain dn = spec.domains.at(n);
      const Polyhedron* pn = dn.as_polyhedron();
      if (!pn || pn->normals.rows() != p0->normals.rows()) {
        fail(ErrorCode::kValidationError, "domain: face count differs from the limit at n = " + std::to_string(n));
      }
      normal_gap.push_back((pn->normals - p0->normals).rowwise().norm().maxCoeff());
      offset_gap.push_back((pn->offsets - p0->offsets).cwiseAbs().maxCoeff());
      const Mat rn = problems.at(n).reflection.polyhedron_matrix(*pn);
      column_gap.push_back((rn - r0).colwise().norm().maxCoeff());
    }
    out.push_back(make_diagnostic("face_normal_gap", std::move(normal_gap)));
    out.push_back(make_diagnostic("face_offset_gap", std::move(offset_gap)));
    out.push_back(make_diagnostic("reflection_column_gap", std::move(column_gap)));
  }
  if (spec.theorem == Theorem::kExpanding) {
    const ProbeSet k = ProbeSet::ball_grid(limit.start, spec.containment_radius, spec.probes.h);
    Diagnostic d{"containment_index", {}, true, {}};
    try {
      d.values.push_back(compact_containment_index(spec.domains, k, idx.back()));
      d.note = "K = closed ball of radius " + std::to_string(spec.containment_radius) + " around z_0";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNotFound) throw;
      d.values.push_back(kInf);
      d.shrinking = false;
      d.note = e.what();
    }
    out.push_back(std::move(d));
  }
  return out;
}

void require_shrinking(const std::vector<Diagnostic>& diagnostics) {
  std::string failed;
  for (const auto& d : diagnostics) {
    if (d.shrinking) continue;
    std::ostringstream s;
    s << d.name << " (final value ";
    const double v = d.values.empty() ? kInf : d.values.back();
    if (std::isfinite(v)) s << v; else s << "inf";
    s << ")";
    failed += (failed.empty() ? "" : ", ") + s.str();
  }
  if (!failed.empty()) {
    fail(ErrorCode::kHypothesisDiagnosticsFailed, "premise diagnostics did not shrink: " + failed);
  }
}

namespace {

ConvergenceReport simulate_and_compare(const ExperimentSpec& spec, std::vector<Diagnostic> diags,
                                       const SampleSink& sink) {
  ConvergenceReport r;
  r.name = spec.name;
  r.theorem = spec.theorem;
  r.limit_kind = spec.limit_kind;
  r.seed = spec.seed;
  r.paths = spec.paths;
  r.diagnostics = std::move(diags);

  auto collect = [&](int index, std::uint64_t base) {
    return collect_functionals(simulation_domain(spec, index), simulation_problem(spec, index),
                               spec.simulation, spec.paths, base, spec.threads, spec.modulus_delta);
  };
  const FunctionalSamples z0 = collect(0, ensemble_seed(spec, 0));
  if (sink) sink(0, z0);
  const FunctionalSamples z0b = collect(0, derive_seed(spec.seed, kReplicate));
  r.limit_stopped_fraction = static_cast<double>(z0.stopped) / static_cast<double>(z0.total);
  r.limit_local_time_fraction =
      z0.kept() ? static_cast<double>(z0.with_local_time) / static_cast<double>(z0.kept()) : 0.0;
  r.self_distance = functional_distances(z0, z0b, spec.energy_cap);

  // Seed-split noise band: permutation null of each statistic on Z_0 and Z_0'.
  const std::uint64_t perm_seed = derive_seed(spec.seed, kPermutations);
  const auto ks = [](const Mat& a, const Mat& b) {
    return two_sample_distance(a, b, DistanceKind::kKsPerCoordinate);
  };
  const std::array<NullDistribution, kFunctionalCount> nulls{
      permutation_null(z0.terminal, z0b.terminal, spec.band_splits, spec.band_quantile, perm_seed, ks),
      permutation_null_energy(z0.terminal, z0b.terminal, spec.band_splits, spec.band_quantile,
                              perm_seed, spec.energy_cap),
      permutation_null(column(z0.sup_norm), column(z0b.sup_norm), spec.band_splits,
                       spec.band_quantile, perm_seed, ks),
      permutation_null(column(z0.local_time), column(z0b.local_time), spec.band_splits,
                       spec.band_quantile, perm_seed, ks),
      permutation_null(column(z0.modulus), column(z0b.modulus), spec.band_splits,
                       spec.band_quantile, perm_seed, ks)};
  for (std::size_t f = 0; f < kFunctionalCount; ++f) {
    r.null_mean[f] = nulls[f].mean;
    r.band[f] = std::min(nulls[f].quantile, spec.band_cap * nulls[f].mean);
  }

  for (int n : spec.indices) {
    const FunctionalSamples zn = collect(n, ensemble_seed(spec, n));
    if (sink) sink(n, zn);
    IndexResult res;
    res.index = n;
    res.distances = functional_distances(zn, z0, spec.energy_cap);
    res.kept = zn.kept();
    res.stopped = zn.stopped;
    res.stopped_fraction = static_cast<double>(zn.stopped) / static_cast<double>(zn.total);
    res.local_time_fraction =
        zn.kept() ? static_cast<double>(zn.with_local_time) / static_cast<double>(zn.kept()) : 0.0;
    res.correction_events = zn.correction_events;
    res.max_residual = zn.max_residual;
    r.results.push_back(res);
  }

  r.pass = true;
  const std::size_t count = r.results.size();
  for (std::size_t f = 0; f < kFunctionalCount; ++f) {
    for (std::size_t i = 0; i + 1 < count; ++i) {
      if (r.results[i + 1].distances[f] > r.results[i].distances[f] + r.band[f]) {
        r.trend_violations[f].push_back(r.results[i + 1].index);
      }
    }
    bool inside = true;
    for (std::size_t i = count >= 2 ? count - 2 : 0; i < count; ++i) {
      inside = inside && r.results[i].distances[f] <= r.band[f];
    }
    r.within_band[f] = inside;
    if (counts_toward_verdict(spec.limit_kind, f)) r.pass = r.pass && inside;
  }
  return r;
}

}  // namespace

ConvergenceReport run_theorem21_experiment(const ExperimentSpec& spec, const SampleSink& sink) {
  spec.validate();
  auto diags = hypothesis_diagnostics(spec);
  require_shrinking(diags);
  return simulate_and_compare(spec, std::move(diags), sink);
}

ConvergenceReport run_theorem32_experiment(const ExperimentSpec& spec, const SampleSink& sink) {
  spec.validate();
  if (spec.theorem != Theorem::kPolyhedral) fail(ErrorCode::kValidationError, "theorem: expected polyhedral");
  std::optional<HittingCheck> hitting;
  bool unsound = false;
  const Domain& d0 = spec.domains.limit;
  const DiffusionSpec p0 = spec.problem(0);
  if (d0.is_orthant() && p0.covariance.is_constant()) {
    const Mat r0 = p0.reflection.polyhedron_matrix(*d0.as_polyhedron());
    HittingCheck h;
    try {
      h = check_hitting_condition(d0, r0, p0.covariance.constant_value());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kHypothesesNotMet) throw;
      if (!spec.unsound_override) fail(ErrorCode::kHittingConditionFailed, e.what());
      h.avoids_corners = false;
    }
    if (!h.avoids_corners) {
      if (!spec.unsound_override) {
        std::string pairs;
        for (const auto& v : h.violations) {
          pairs += " (" + std::to_string(v.i) + "," + std::to_string(v.j) + "): " +
                   std::to_string(v.lhs) + " < " + std::to_string(v.rhs) + ";";
        }
        fail(ErrorCode::kHittingConditionFailed,
             "the limit SRBM may hit the corners of the orthant;" + pairs);
      }
      unsound = true;
    }
    hitting = h;
  }
  auto diags = hypothesis_diagnostics(spec);
  if (!hitting) {
    diags.push_back(Diagnostic{"hitting_condition", {}, true,
                               "not checked: the corner criterion covers the orthant with constant covariance"});
  }
  require_shrinking(diags);
  ConvergenceReport r = simulate_and_compare(spec, std::move(diags), sink);
  r.hitting = hitting;
  r.unsound = unsound;
  return r;
}

ConvergenceReport run_theorem52_experiment(const ExperimentSpec& spec, const SampleSink& sink) {
  spec.validate();
  if (spec.theorem != Theorem::kExpanding) fail(ErrorCode::kValidationError, "theorem: expected expanding");
  auto diags = hypothesis_diagnostics(spec);
  require_shrinking(diags);
  return simulate_and_compare(spec, std::move(diags), sink);
}

ConvergenceReport run_theorem53_experiment(const ExperimentSpec& spec, const SampleSink& sink) {
  spec.validate();
  if (spec.theorem != Theorem::kPunctured) fail(ErrorCode::kValidationError, "theorem: expected punctured");
  auto diags = hypothesis_diagnostics(spec);
  require_shrinking(diags);
  return simulate_and_compare(spec, std::move(diags), sink);
}

ConvergenceReport run_experiment(const ExperimentSpec& spec, const SampleSink& sink) {
  switch (spec.theorem) {
    case Theorem::kDomainSequence: return run_theorem21_experiment(spec, sink);
    case Theorem::kPolyhedral: return run_theorem32_experiment(spec, sink);
    case Theorem::kExpanding: return run_theorem52_experiment(spec, sink);
    case Theorem::kPunctured: return run_theorem53_experiment(spec, sink);
  }
  fail(ErrorCode::kInvalidArgument, "unknown theorem");
}

std::string report_to_json(const ConvergenceReport& r) {
  Json j;
  j["name"] = r.name;
  j["theorem"] = std::string(theorem_name(r.theorem));
  j["limit_kind"] = r.limit_kind == LimitKind::kReflected ? "reflected" : "non_reflected";
  j["seed"] = r.seed;
  j["paths"] = r.paths;
  j["verdict"] = r.pass ? "PASS" : "FAIL";
  j["unsound"] = r.unsound;
  Json fn = Json::array();
  for (std::size_t f = 0; f < kFunctionalCount; ++f) {
    Json e;
    e["name"] = kFunctionalNames[f];
    e["in_verdict"] = counts_toward_verdict(r.limit_kind, f);
    e["self_distance"] = number(r.self_distance[f]);
    e["null_mean"] = number(r.null_mean[f]);
    e["band"] = number(r.band[f]);
    e["within_band_at_final_indices"] = r.within_band[f];
    e["trend_violations"] = r.trend_violations[f];
    fn.push_back(e);
  }
  j["functionals"] = fn;
  Json res = Json::array();
  for (const auto& x : r.results) {
    Json e;
    e["index"] = x.index;
    Json dist;
    for (std::size_t f = 0; f < kFunctionalCount; ++f) dist[kFunctionalNames[f]] = number(x.distances[f]);
    e["distances"] = dist;
    e["kept"] = x.kept;
    e["stopped"] = x.stopped;
    e["stopped_fraction"] = number(x.stopped_fraction);
    e["local_time_fraction"] = number(x.local_time_fraction);
    e["correction_events"] = x.correction_events;
    e["max_residual"] = number(x.max_residual);
    res.push_back(e);
  }
  j["results"] = res;
  j["limit"] = {{"stopped_fraction", number(r.limit_stopped_fraction)},
                {"local_time_fraction", number(r.limit_local_time_fraction)}};
  Json diags = Json::array();
  for (const auto& d : r.diagnostics) {
    Json e;
    e["name"] = d.name;
    Json vals = Json::array();
    for (double v : d.values) vals.push_back(number(v));
    e["values"] = vals;
    e["shrinking"] = d.shrinking;
    if (!d.note.empty()) e["note"] = d.note;
    diags.push_back(e);
  }
  j["diagnostics"] = diags;
  if (r.hitting) {
    Json h;
    h["avoids_corners"] = r.hitting->avoids_corners;
    h["spectral_radius"] = number(r.hitting->spectral_radius);
    Json v = Json::array();
    for (const auto& x : r.hitting->violations) {
      v.push_back({{"i", x.i}, {"j", x.j}, {"lhs", number(x.lhs)}, {"rhs", number(x.rhs)}});
    }
    h["violations"] = v;
    j["hitting_condition"] = h;
  }
  return j.dump(2) + "\n";
}

std::string report_to_text(const ConvergenceReport& r) {
  std::string out;
  char buf[256];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%12.6g", v);
    return std::string(buf);
  };
  out += "experiment " + r.name + " (" + std::string(theorem_name(r.theorem)) + ", " +
         (r.limit_kind == LimitKind::kReflected ? "reflected" : "non-reflected") + " limit)\n";
  out += "      n     kept  stopped  with_lt";
  for (const char* name : kFunctionalNames) {
    std::snprintf(buf, sizeof buf, " %16s", name);
    out += buf;
  }
  out += "\n";
  for (const auto& x : r.results) {
    std::snprintf(buf, sizeof buf, "%7d %8zu %8.4f %8.4f", x.index, x.kept, x.stopped_fraction,
                  x.local_time_fraction);
    out += buf;
    for (double d : x.distances) out += "     " + fmt(d);
    out += "\n";
  }
  auto row = [&](const char* label, const std::array<double, kFunctionalCount>& v) {
    std::snprintf(buf, sizeof buf, "%-34s", label);
    out += buf;
    for (double d : v) out += "     " + fmt(d);
    out += "\n";
  };
  row("self-distance (Z_0 vs Z_0')", r.self_distance);
  row("noise band", r.band);
  for (const auto& d : r.diagnostics) {
    std::snprintf(buf, sizeof buf, "  %-24s", d.name.c_str());
    out += buf;
    for (double v : d.values) out += " " + fmt(v);
    out += d.shrinking ? "  shrinking\n" : "  NOT shrinking\n";
  }
  if (r.unsound) out += "UNSOUND: limit fails the corner-avoidance criterion (override)\n";
  out += std::string("verdict: ") + (r.pass ? "PASS" : "FAIL") + "\n";
  return out;
}

}  // namespace reflectolab
