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

#include "reflectolab/app.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "reflectolab/config.hpp"
#include "reflectolab/error.hpp"
#include "reflectolab/harness.hpp"
#include "reflectolab/path_io.hpp"
#include "reflectolab/set_convergence.hpp"
#include "reflectolab/simulation.hpp"

namespace reflectolab {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

Json num(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

class Output {
 public:
  explicit Output(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(dir_ / name, std::ios::binary | std::ios::trunc);
    f << content;
    f.close();
    if (!f) fail(ErrorCode::kIoError, "cannot write " + (dir_ / name).string());
    files_.push_back(name);
  }

  std::ofstream open(const std::string& name) {
    std::ofstream f(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::kIoError, "cannot write " + (dir_ / name).string());
    files_.push_back(name);
    return f;
  }

  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

// "key: value" lines for the top level of a report.
std::string json_to_text(const Json& j) {
  std::size_t width = 0;
  for (const auto& [k, v] : j.items()) width = std::max(width, k.size());
  std::string out;
  for (const auto& [k, v] : j.items()) {
    out += k + std::string(width - k.size() + 2, ' ');
    out += v.is_string() ? v.get<std::string>() : v.dump();
    out += '\n';
  }
  return out;
}

struct Context {
  const RunOptions& options;
  RunConfigFile& file;
  Output& out;
  std::optional<std::uint64_t> seed;
  unsigned threads;

  void log(const std::string& msg) const {
    if (options.log && options.verbosity > 0) options.log(msg);
  }
};

std::uint64_t need_seed(const Context& c) {
  if (!c.seed) {
    fail(ErrorCode::kValidationError,
         "seed: required for a stochastic command (pass --seed, set seed in the config or " +
             std::string(kSeedEnvVar) + ")");
  }
  return *c.seed;
}

const Domain& need_domain(const Context& c) {
  if (!c.file.domain) fail(ErrorCode::kValidationError, "domain: required key is missing");
  return *c.file.domain;
}

const DiffusionSpec& need_diffusion(const Context& c) {
  if (!c.file.diffusion) fail(ErrorCode::kValidationError, "diffusion: required key is missing");
  return *c.file.diffusion;
}

int run_simulate(Context& c) {
  const Domain& domain = need_domain(c);
  const DiffusionSpec& spec = need_diffusion(c);
  const std::uint64_t seed = need_seed(c);
  const SimulationOptions& opts = c.file.simulation;
  const std::size_t count = c.file.paths;
  const auto d = static_cast<std::size_t>(domain.dim());

  std::vector<double> terminal(count * d), lt(count), sup(count), residual(count);
  std::vector<char> stopped(count);
  std::vector<std::size_t> events(count);
  std::vector<PathSample> kept;
  const bool keep = c.options.dump_paths || c.options.binary_paths;
  if (keep) kept.resize(count);
  c.log("simulating " + std::to_string(count) + " paths of " + std::to_string(opts.steps()) + " steps");
  for_each_path(domain, spec, opts, count, seed, c.threads, [&](std::size_t i, PathSample&& p) {
    const PathFunctionals f = path_functionals(p, 0.01);
    for (std::size_t k = 0; k < d; ++k) terminal[i * d + k] = f.terminal(static_cast<Eigen::Index>(k));
    lt[i] = f.local_time;
    sup[i] = f.sup_norm;
    stopped[i] = p.stopped() ? 1 : 0;
    events[i] = p.correction_events;
    residual[i] = p.max_residual;
    if (keep) kept[i] = std::move(p);
  });

  std::size_t n_stopped = 0, n_events = 0, n_local = 0;
  double max_res = 0.0, lt_sum = 0.0;
  Vec mean = Vec::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < count; ++i) {
    n_stopped += static_cast<std::size_t>(stopped[i]);
    n_events += events[i];
    max_res = std::max(max_res, residual[i]);
    lt_sum += lt[i];
    if (lt[i] > 0.0) ++n_local;
    for (std::size_t k = 0; k < d; ++k) mean(static_cast<Eigen::Index>(k)) += terminal[i * d + k];
  }
  const double nc = static_cast<double>(count);
  Json r;
  r["command"] = "simulate";
  r["domain"] = std::string(domain_kind_name(domain.kind()));
  r["dim"] = d;
  r["seed"] = seed;
  r["paths"] = count;
  r["steps"] = opts.steps();
  r["horizon"] = num(opts.horizon);
  r["dt"] = num(opts.dt);
  r["stopped"] = n_stopped;
  r["stopped_fraction"] = num(static_cast<double>(n_stopped) / nc);
  r["correction_events"] = n_events;
  r["max_residual"] = num(max_res);
  r["terminal_mean"] = vec_json(mean / nc);
  r["local_time_mean"] = num(lt_sum / nc);
  r["local_time_positive_fraction"] = num(static_cast<double>(n_local) / nc);
  c.out.write("report.json", r.dump(2) + "\n");
  c.out.write("report.txt", json_to_text(r));

  std::string csv = "path_id";
  for (std::size_t k = 1; k <= d; ++k) csv += ",Z_" + std::to_string(k);
  csv += ",l,sup_norm,stopped_flag\n";
  for (std::size_t i = 0; i < count; ++i) {
    csv += std::to_string(i);
    for (std::size_t k = 0; k < d; ++k) csv += "," + format_double(terminal[i * d + k]);
    csv += "," + format_double(lt[i]) + "," + format_double(sup[i]) + (stopped[i] ? ",1\n" : ",0\n");
  }
  c.out.write("samples.csv", csv);
  if (c.options.dump_paths) {
    auto f = c.out.open("paths.csv");
    write_paths_csv(f, kept);
  }
  if (c.options.binary_paths) {
    auto f = c.out.open("paths.rlpf");
    for (const auto& p : kept) write_path_frame(f, p);
  }
  return kExitOk;
}

int run_geometry_check(Context& c) {
  const Domain& domain = need_domain(c);
  if (!c.file.geometry) fail(ErrorCode::kValidationError, "geometry: required key is missing");
  const GeometryCheckConfig& g = *c.file.geometry;
  const std::vector<Vec> probes = g.probes.points();
  c.log("checking " + std::to_string(probes.size()) + " probes");
  const Assumption1Report a1 = check_assumption1(domain, probes, g.boundary_h, g.collar);
  const double tolerance = g.boundary_h * std::sqrt(static_cast<double>(domain.dim()));

  std::string csv = "probe_id";
  for (int k = 1; k <= domain.dim(); ++k) csv += ",x_" + std::to_string(k);
  csv += ",phi,dist_v,discrepancy\n";
  double min_phi = kInf, max_phi = -kInf;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const double phi = signed_distance(domain, probes[i]);
    min_phi = std::min(min_phi, phi);
    max_phi = std::max(max_phi, phi);
    csv += std::to_string(i);
    for (Eigen::Index k = 0; k < probes[i].size(); ++k) csv += "," + format_double(probes[i](k));
    csv += "," + format_double(phi) + "," + format_double(exceptional_set_distance(domain, probes[i])) +
           "," + format_double(a1.discrepancies[i]) + "\n";
  }
  const bool ok = a1.max_discrepancy <= tolerance;
  Json r;
  r["command"] = "geometry-check";
  r["domain"] = std::string(domain_kind_name(domain.kind()));
  r["dim"] = domain.dim();
  r["probes"] = probes.size();
  r["boundary_samples"] = a1.boundary_samples;
  r["boundary_h"] = num(g.boundary_h);
  r["collar"] = num(g.collar);
  r["min_phi"] = num(min_phi);
  r["max_phi"] = num(max_phi);
  r["max_discrepancy"] = num(a1.max_discrepancy);
  r["tolerance"] = num(tolerance);
  r["verdict"] = ok ? "PASS" : "FAIL";
  c.out.write("report.json", r.dump(2) + "\n");
  c.out.write("report.txt", json_to_text(r));
  c.out.write("samples.csv", csv);
  return ok ? kExitOk : kExitFail;
}

int run_domain_convergence(Context& c) {
  if (!c.file.convergence) fail(ErrorCode::kValidationError, "convergence: required key is missing");
  const ConvergenceConfig& cc = *c.file.convergence;
  Json metrics = Json::object();
  std::string csv = "index,metric,value\n";
  for (ConvergenceMetric m : cc.metrics) {
    const std::string name(convergence_metric_name(m));
    c.log("metric " + name);
    std::vector<double> values;
    for (int n : cc.indices) {
      double v = 0.0;
      switch (m) {
        case ConvergenceMetric::kWeak: v = weak_convergence_gap(cc.family, n, cc.probes); break;
        case ConvergenceMetric::kWijsmanBoundary:
          v = wijsman_gap(cc.family, n, WijsmanTarget::kBoundary, cc.probes);
          break;
        case ConvergenceMetric::kWijsmanDomain:
          v = wijsman_gap(cc.family, n, WijsmanTarget::kDomain, cc.probes);
          break;
        case ConvergenceMetric::kWijsmanComplement:
          v = wijsman_gap(cc.family, n, WijsmanTarget::kComplement, cc.probes);
          break;
        case ConvergenceMetric::kHausdorff:
          v = hausdorff_distance(cc.family.at(n), cc.family.limit, cc.hausdorff_h, cc.hausdorff_box);
          break;
        case ConvergenceMetric::kConditionB:
          v = exceptional_set_condition_b(cc.family, n, cc.probes);
          break;
      }
      values.push_back(v);
      csv += std::to_string(n) + "," + name + "," + format_double(v) + "\n";
    }
    Json vals = Json::array();
    for (double v : values) vals.push_back(num(v));
    metrics[name] = {{"values", vals},
                     {"final", num(values.back())},
                     {"shrinking", values.back() <= 1e-9 ||
                                       (values.size() >= 2 && std::isfinite(values.back()) &&
                                        values.back() <= 0.5 * values.front())}};
  }
  Json r;
  r["command"] = "domain-convergence";
  r["family"] = cc.family.name;
  r["limit"] = std::string(domain_kind_name(cc.family.limit.kind()));
  r["indices"] = cc.indices;
  r["probes"] = cc.probes.points().size();
  r["metrics"] = metrics;
  c.out.write("report.json", r.dump(2) + "\n");
  c.out.write("report.txt", json_to_text(r));
  c.out.write("samples.csv", csv);
  return kExitOk;
}

int run_hitting_check(Context& c) {
  const Domain& domain = need_domain(c);
  const DiffusionSpec& spec = need_diffusion(c);
  const Polyhedron* p = domain.as_polyhedron();
  if (!p) fail(ErrorCode::kUnsupported, "hitting-check: the domain must be an orthant");
  if (!spec.covariance.is_constant()) fail(ErrorCode::kUnsupported, "hitting-check: the covariance must be constant");
  const Mat r = spec.reflection.polyhedron_matrix(*p);
  const Mat& a = spec.covariance.constant_value();
  const HittingCheck h = check_hitting_condition(domain, r, a);
  Json v = Json::array();
  for (const auto& x : h.violations) {
    v.push_back({{"i", x.i}, {"j", x.j}, {"lhs", num(x.lhs)}, {"rhs", num(x.rhs)}});
  }
  Json rep;
  rep["command"] = "hitting-check";
  rep["dim"] = domain.dim();
  rep["avoids_corners"] = h.avoids_corners;
  rep["spectral_radius"] = num(h.spectral_radius);
  rep["violations"] = v;
  c.out.write("report.json", rep.dump(2) + "\n");
  c.out.write("report.txt", json_to_text(rep));
  return h.avoids_corners ? kExitOk : kExitFail;
}

Json diagnostics_json(const std::vector<Diagnostic>& diags) {
  Json out = Json::array();
  for (const auto& d : diags) {
    Json vals = Json::array();
    for (double v : d.values) vals.push_back(num(v));
    Json e{{"name", d.name}, {"values", vals}, {"shrinking", d.shrinking}};
    if (!d.note.empty()) e["note"] = d.note;
    out.push_back(e);
  }
  return out;
}

int run_experiment_command(Context& c) {
  if (!c.file.experiment) fail(ErrorCode::kValidationError, "experiment: required key is missing");
  ExperimentSpec spec = *c.file.experiment;
  spec.seed = need_seed(c);
  spec.threads = c.threads;
  spec.unsound_override = spec.unsound_override || c.options.unsound_override;
  const int d = spec.dim();

  std::string csv = "index,path_id";
  for (int k = 1; k <= d; ++k) csv += ",Z_" + std::to_string(k);
  csv += ",sup_norm,local_time,modulus\n";
  const SampleSink sink = [&](int index, const FunctionalSamples& s) {
    c.log("ensemble n = " + std::to_string(index) + ": " + std::to_string(s.kept()) + " kept, " +
          std::to_string(s.stopped) + " stopped");
    for (std::size_t i = 0; i < s.kept(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      csv += std::to_string(index) + "," + std::to_string(s.path_ids[i]);
      for (Eigen::Index k = 0; k < d; ++k) csv += "," + format_double(s.terminal(row, k));
      csv += "," + format_double(s.sup_norm[i]) + "," + format_double(s.local_time[i]) + "," +
             format_double(s.modulus[i]) + "\n";
    }
  };

  ConvergenceReport report;
  try {
    report = run_experiment(spec, sink);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kHypothesisDiagnosticsFailed && e.code() != ErrorCode::kHittingConditionFailed) {
      throw;
    }
    Json r;
    r["name"] = spec.name;
    r["theorem"] = std::string(theorem_name(spec.theorem));
    r["seed"] = spec.seed;
    r["verdict"] = "FAIL";
    r["refused"] = true;
    r["error"] = {{"code", std::string(error_code_name(e.code()))}, {"message", e.what()}};
    try {
      r["diagnostics"] = diagnostics_json(hypothesis_diagnostics(spec));
    } catch (const Error& inner) {
      r["diagnostics"] = Json::array();
      r["diagnostics_error"] = inner.what();
    }
    c.out.write("report.json", r.dump(2) + "\n");
    c.out.write("report.txt", "experiment " + spec.name + ": REFUSED\n" +
                                  std::string(error_code_name(e.code())) + ": " + e.what() + "\n");
    return kExitFail;
  }
  c.out.write("report.json", report_to_json(report));
  c.out.write("report.txt", report_to_text(report));
  c.out.write("samples.csv", csv);
  return report.pass ? kExitOk : kExitFail;
}

Json error_json(const std::exception& e) {
  Json err;
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) {
    err["code"] = std::string(error_code_name(ce->code()));
    err["status"] = static_cast<int>(ce->code());
    err["message"] = ce->what();
    if (!ce->key_path().empty()) err["key_path"] = ce->key_path();
    if (ce->line() > 0) {
      err["line"] = ce->line();
      err["column"] = ce->column();
    }
  } else if (const auto* re = dynamic_cast<const Error*>(&e)) {
    err["code"] = std::string(error_code_name(re->code()));
    err["status"] = static_cast<int>(re->code());
    err["message"] = re->what();
  } else {
    err["code"] = "InternalError";
    err["status"] = -1;
    err["message"] = e.what();
  }
  return Json{{"error", err}};
}

}  // namespace

std::string_view seed_source_name(SeedSource s) noexcept {
  switch (s) {
    case SeedSource::kFlag: return "flag";
    case SeedSource::kConfig: return "config";
    case SeedSource::kEnvironment: return "environment";
    case SeedSource::kNone: return "none";
  }
  return "none";
}

ResolvedSeed resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> config,
                          const char* env_value) {
  if (flag) return {flag, SeedSource::kFlag};
  if (config) return {config, SeedSource::kConfig};
  if (env_value && *env_value) {
    const std::string_view s(env_value);
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      fail(ErrorCode::kValidationError,
           std::string(kSeedEnvVar) + ": expected an unsigned 64-bit integer, got '" + std::string(s) + "'");
    }
    return {v, SeedSource::kEnvironment};
  }
  return {};
}

RunOutcome run_command(const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunOutcome outcome;
  Output out(options.out_dir);
  Json manifest;
  manifest["version"] = kVersion;
  manifest["command"] = options.command;
  manifest["config"] = options.config_label;
  manifest["config_hash"] = "fnv1a64:" + hex64(fnv1a64(options.config_text));
  manifest["seed"] = nullptr;
  manifest["seed_source"] = "none";
  bool dir_ok = false;
  try {
    std::error_code ec;
    fs::create_directories(options.out_dir, ec);
    if (ec || !fs::is_directory(options.out_dir)) {
      fail(ErrorCode::kIoError, "cannot create output directory " + options.out_dir.string());
    }
    dir_ok = true;
    RunConfigFile file = parse_config(options.config_text);
    std::string command = options.command.empty() ? file.command.value_or("") : options.command;
    if (command.empty()) fail(ErrorCode::kValidationError, "command: required key is missing");
    manifest["command"] = command;
    const ResolvedSeed seed = resolve_seed(options.seed, file.seed, std::getenv(kSeedEnvVar));
    if (seed.seed) manifest["seed"] = *seed.seed;
    manifest["seed_source"] = std::string(seed_source_name(seed.source));
    unsigned threads = options.threads.value_or(file.threads.value_or(0));
    if (threads == 0) threads = default_threads();
    manifest["threads"] = threads;
    Context ctx{options, file, out, seed.seed, threads};
    if (command == "simulate") {
      outcome.exit_status = run_simulate(ctx);
    } else if (command == "geometry-check") {
      outcome.exit_status = run_geometry_check(ctx);
    } else if (command == "domain-convergence") {
      outcome.exit_status = run_domain_convergence(ctx);
    } else if (command == "hitting-check") {
      outcome.exit_status = run_hitting_check(ctx);
    } else if (command == "experiment") {
      outcome.exit_status = run_experiment_command(ctx);
    } else {
      fail(ErrorCode::kValidationError, "command: unknown command '" + command + "'");
    }
    outcome.summary = command + (outcome.exit_status == kExitOk ? ": complete" : ": FAIL");
  } catch (const std::exception& e) {
    outcome.exit_status = kExitError;
    outcome.summary = e.what();
    const auto* re = dynamic_cast<const Error*>(&e);
    outcome.error_code = re ? static_cast<int>(re->code()) : -1;
    if (dir_ok) {
      try {
        out.write("error.json", error_json(e).dump(2) + "\n");
      } catch (const std::exception&) {
      }
    }
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest["exit_status"] = outcome.exit_status;
  manifest["wall_time_seconds"] = wall;
  manifest["created_utc"] = [] {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return std::string(buf);
  }();
  if (dir_ok) {
    Json files = Json::array();
    for (const auto& f : out.files()) files.push_back(f);
    manifest["files"] = files;
    try {
      out.write("manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception&) {
    }
  }
  outcome.files = out.files();
  return outcome;
}

}  // namespace reflectolab
