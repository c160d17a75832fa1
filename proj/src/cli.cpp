#include "pdhg/cli.hpp"

#include "pdhg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace pdhg::cli {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& path, const std::string& detail) {
  throw ConfigError("config field '" + path + "': " + detail);
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& item : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      field_error(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
  }
}

double get_positive(const json& j, const std::string& path) {
  if (!j.is_number()) field_error(path, "must be a number");
  const double v = j.get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) field_error(path, "must be positive and finite");
  return v;
}

long get_count(const json& j, const std::string& path) {
  if (!j.is_number_integer()) field_error(path, "must be an integer");
  const auto v = j.get<long long>();
  if (v < 1) field_error(path, "must be >= 1");
  return static_cast<long>(v);
}

GeometrySpec parse_geometry(const json& j, const std::string& path) {
  if (!j.is_object()) field_error(path, "must be an object");
  if (!j.contains("kind") || !j["kind"].is_string()) field_error(path + ".kind", "required string");
  const auto kind = j["kind"].get<std::string>();
  GeometrySpec g;
  if (kind == "scalar_quadratic") {
    reject_unknown(j, path, {"kind", "step", "step_over_norm"});
    if (j.contains("step") == j.contains("step_over_norm"))
      field_error(path, "give exactly one of 'step' or 'step_over_norm'");
    if (j.contains("step")) g.step = get_positive(j["step"], path + ".step");
    else g.step_over_norm = get_positive(j["step_over_norm"], path + ".step_over_norm");
  } else if (kind == "diagonal_quadratic") {
    g.kind = bregman::GeometryKind::diagonal_quadratic;
    reject_unknown(j, path, {"kind", "weights"});
    if (!j.contains("weights") || !j["weights"].is_array() || j["weights"].empty())
      field_error(path + ".weights", "required nonempty array");
    Vector w(static_cast<Eigen::Index>(j["weights"].size()));
    for (std::size_t i = 0; i < j["weights"].size(); ++i)
      w[static_cast<Eigen::Index>(i)] =
          get_positive(j["weights"][i], path + ".weights[" + std::to_string(i) + "]");
    g.weights = std::move(w);
  } else if (kind == "separable_smooth") {
    g.kind = bregman::GeometryKind::separable_smooth;
    reject_unknown(j, path, {"kind", "quartic", "quadratic"});
    if (j.contains("quartic")) {
      if (!j["quartic"].is_number() || j["quartic"].get<double>() < 0.0)
        field_error(path + ".quartic", "must be a number >= 0");
      g.quartic = j["quartic"].get<double>();
    }
    if (j.contains("quadratic")) g.quadratic = get_positive(j["quadratic"], path + ".quadratic");
  } else {
    field_error(path + ".kind",
                "expected scalar_quadratic, diagonal_quadratic or separable_smooth, got '" +
                    kind + "'");
  }
  return g;
}

GeometrySpec default_geometry() {
  GeometrySpec g;
  g.step_over_norm = 0.9;
  return g;
}

bregman::Geometry make_geometry(const GeometrySpec& spec, Eigen::Index dim, double norm_C,
                                const std::string& path) {
  switch (spec.kind) {
    case bregman::GeometryKind::scalar_quadratic:
      return bregman::Geometry::scalar_quadratic(
          dim, spec.step ? *spec.step : *spec.step_over_norm / norm_C);
    case bregman::GeometryKind::diagonal_quadratic:
      if (spec.weights->size() != dim) {
        std::ostringstream msg;
        msg << "has " << spec.weights->size() << " entries, problem needs " << dim;
        field_error(path + ".weights", msg.str());
      }
      return bregman::Geometry::diagonal_quadratic(*spec.weights);
    case bregman::GeometryKind::separable_smooth:
      return bregman::Geometry::separable_smooth(std::vector<bregman::ScalarPotential>(
          static_cast<std::size_t>(dim), bregman::quartic_potential(spec.quartic, spec.quadratic)));
  }
  field_error(path, "unknown geometry kind");
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

std::pair<int, int> line_and_column(std::string_view text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_and_column(text, e.byte);
    std::ostringstream msg;
    msg << "config parse error at line " << line << ", column " << col << ": " << e.what();
    throw ConfigError(msg.str());
  }
  if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
  reject_unknown(doc, "",
                 {"problem", "geometry1", "geometry2", "max_iter", "residual_tol", "record_every",
                  "seed", "output_path", "override_certificate"});

  RunConfig cfg;
  if (!doc.contains("problem")) field_error("problem", "required");
  const json& prob = doc["problem"];
  if (!prob.is_object()) field_error("problem", "must be an object");
  reject_unknown(prob, "problem", {"name", "params"});
  if (!prob.contains("name") || !prob["name"].is_string())
    field_error("problem.name", "required string");
  cfg.problem.name = prob["name"].get<std::string>();
  const auto& names = problems::catalog_names();
  if (std::find(names.begin(), names.end(), cfg.problem.name) == names.end()) {
    std::string list;
    for (const auto& n : names) list += " " + n;
    field_error("problem.name", "unknown catalog entry '" + cfg.problem.name + "'; expected one of" + list);
  }
  cfg.problem.params = prob.contains("params") ? prob["params"] : json::object();
  if (!cfg.problem.params.is_object()) field_error("problem.params", "must be an object");

  cfg.geometry1 = doc.contains("geometry1") ? parse_geometry(doc["geometry1"], "geometry1")
                                            : default_geometry();
  cfg.geometry2 = doc.contains("geometry2") ? parse_geometry(doc["geometry2"], "geometry2")
                                            : default_geometry();
  if (doc.contains("max_iter")) cfg.max_iter = get_count(doc["max_iter"], "max_iter");
  if (doc.contains("residual_tol"))
    cfg.residual_tol = get_positive(doc["residual_tol"], "residual_tol");
  if (doc.contains("record_every"))
    cfg.record_every = get_count(doc["record_every"], "record_every");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
      field_error("seed", "must be a nonnegative integer");
    if (doc["seed"].is_number_integer() && doc["seed"].get<long long>() < 0)
      field_error("seed", "must be a nonnegative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("output_path")) {
    if (!doc["output_path"].is_string() || doc["output_path"].get<std::string>().empty())
      field_error("output_path", "must be a nonempty string");
    cfg.output_path = doc["output_path"].get<std::string>();
  }
  if (doc.contains("override_certificate")) {
    if (!doc["override_certificate"].is_boolean())
      field_error("override_certificate", "must be a boolean");
    cfg.override_certificate = doc["override_certificate"].get<bool>();
  }
  return cfg;
}

ResolvedRun resolve(const RunConfig& config) {
  auto problem = problems::build(config.problem.name, config.problem.params);
  const double norm_C = solver::estimate_norm(problem.C(), config.seed);
  solver::SolverConfig sc{
      .geometry1 = make_geometry(config.geometry1, problem.primal_dim(), norm_C, "geometry1"),
      .geometry2 = make_geometry(config.geometry2, problem.dual_dim(), norm_C, "geometry2"),
      .max_iter = config.max_iter,
      .residual_tol = config.residual_tol,
      .inner_tol = bregman::kDefaultInnerTol,
      .record_every = config.record_every,
      .seed = config.seed,
      .override_certificate = config.override_certificate,
  };
  auto cert = bregman::certify_alpha(sc.geometry1, sc.geometry2, norm_C);
  if (!cert.valid && !config.override_certificate) {
    std::ostringstream msg;
    msg << "step sizes rejected: joint condition needs alpha > 0 (for scalar geometries, "
        << "tau*sigma*|C|^2 < 1), got alpha = " << cert.alpha << " with |C| = " << norm_C;
    if (sc.geometry1.kind() == bregman::GeometryKind::scalar_quadratic &&
        sc.geometry2.kind() == bregman::GeometryKind::scalar_quadratic)
      msg << ", tau*sigma*|C|^2 = "
          << sc.geometry1.step() * sc.geometry2.step() * norm_C * norm_C;
    throw ConfigError(msg.str());
  }
  return ResolvedRun{std::move(problem), std::move(sc), cert};
}

void write_csv(const Trace& trace, std::ostream& out) {
  out << "n,primal_residual,dual_residual,lyapunov,ergodic_gap_lhs,ergodic_gap_rhs,dist_to_ref,"
         "objective_gap\n";
  for (const auto& r : trace.rows) {
    out << r.n << ',' << format_number(r.primal_residual) << ','
        << format_number(r.dual_residual) << ',' << format_optional(r.lyapunov) << ','
        << format_optional(r.ergodic_gap_lhs) << ',' << format_optional(r.ergodic_gap_rhs) << ','
        << format_optional(r.dist_to_ref) << ',' << format_optional(r.objective_gap) << '\n';
  }
}

std::vector<std::string> check_trace_invariants(const Trace& trace) {
  std::vector<std::string> issues;
  std::optional<double> delta0;
  if (!trace.rows.empty() && trace.rows.front().lyapunov && trace.rows.front().ergodic_gap_rhs)
    delta0 = *trace.rows.front().ergodic_gap_rhs * static_cast<double>(trace.rows.front().n);
  const double tol = 1e-10 * (1.0 + delta0.value_or(0.0));
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const auto& r = trace.rows[i];
    if (i > 0 && r.lyapunov && trace.rows[i - 1].lyapunov &&
        *r.lyapunov > *trace.rows[i - 1].lyapunov + tol) {
      std::ostringstream m;
      m << "n=" << r.n << ": lyapunov increased from " << *trace.rows[i - 1].lyapunov << " to "
        << *r.lyapunov;
      issues.push_back(m.str());
    }
    if (r.ergodic_gap_lhs && r.ergodic_gap_rhs &&
        (*r.ergodic_gap_lhs < -1e-9 || *r.ergodic_gap_lhs > *r.ergodic_gap_rhs + 1e-9)) {
      std::ostringstream m;
      m << "n=" << r.n << ": ergodic gap sandwich 0 <= " << *r.ergodic_gap_lhs
        << " <= " << *r.ergodic_gap_rhs << " fails";
      issues.push_back(m.str());
    }
  }
  return issues;
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const auto resolved = resolve(config);
    const auto& p = resolved.problem;
    const Vector x0 = Vector::Zero(p.primal_dim());
    const Vector y0 = Vector::Zero(p.dual_dim());
    const Trace trace = solver::run(p, resolved.solver, x0, y0);

    std::ofstream csv(config.output_path, std::ios::binary);
    if (!csv) {
      err << "error: cannot open output file '" << config.output_path << "'\n";
      return 1;
    }
    write_csv(trace, csv);
    csv.close();
    if (!csv) {
      err << "error: failed writing '" << config.output_path << "'\n";
      return 1;
    }

    const auto& last = trace.rows.back();
    out << "problem: " << p.name() << '\n'
        << "termination: " << to_string(trace.termination) << '\n'
        << "iterations: " << trace.final_state.n << '\n'
        << "certified: " << (trace.certified ? "true" : "false (uncertified run)") << '\n'
        << "norm_C: " << format_number(trace.certificate.norm_C) << '\n'
        << "geometry1: " << resolved.solver.geometry1.describe() << '\n'
        << "geometry2: " << resolved.solver.geometry2.describe() << '\n'
        << "geom1_modulus: " << format_number(trace.certificate.geom1_modulus) << '\n'
        << "geom2_modulus: " << format_number(trace.certificate.geom2_modulus) << '\n'
        << "alpha: " << format_number(trace.certificate.alpha) << '\n'
        << "final_primal_residual: " << format_number(last.primal_residual) << '\n'
        << "final_dual_residual: " << format_number(last.dual_residual) << '\n'
        << "final_lyapunov: " << format_optional(last.lyapunov) << '\n'
        << "final_dist_to_ref: " << format_optional(last.dist_to_ref) << '\n'
        << "final_objective_gap: " << format_optional(last.objective_gap) << '\n';
    if (trace.certified) {
      const auto issues = check_trace_invariants(trace);
      out << "invariant_violations: " << issues.size() << '\n';
      for (const auto& s : issues) out << "  " << s << '\n';
    }
    out << "csv: " << config.output_path << '\n';

    switch (trace.termination) {
      case Termination::converged: return 0;
      case Termination::max_iter: return 2;
      case Termination::error:
        err << "error: " << trace.error_message << '\n';
        return 1;
    }
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int certify_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    RunConfig relaxed = config;
    relaxed.override_certificate = true;
    const auto resolved = resolve(relaxed);
    const auto& cert = resolved.certificate;
    out << "problem: " << resolved.problem.name() << '\n'
        << "norm_C: " << format_number(cert.norm_C) << '\n'
        << "geometry1: " << resolved.solver.geometry1.describe() << '\n'
        << "geometry2: " << resolved.solver.geometry2.describe() << '\n'
        << "geom1_modulus: " << format_number(cert.geom1_modulus) << '\n'
        << "geom2_modulus: " << format_number(cert.geom2_modulus) << '\n'
        << "alpha: " << format_number(cert.alpha) << '\n'
        << "valid: " << (cert.valid ? "true" : "false") << '\n';
    if (cert.valid) {
      const auto report =
          bregman::check_joint_condition(resolved.solver.geometry1, resolved.solver.geometry2,
                                         resolved.problem.C(), cert.alpha, 10000, config.seed);
      out << "sampled_check: " << report.samples << " samples, min " << format_number(report.min_value)
          << ", violations " << report.violations << '\n';
    }
    return cert.valid ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace pdhg::cli
