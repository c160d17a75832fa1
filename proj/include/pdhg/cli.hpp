#pragma once

#include "pdhg/bregman.hpp"
#include "pdhg/errors.hpp"
#include "pdhg/problems.hpp"
#include "pdhg/solver.hpp"
#include "pdhg/state.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace pdhg::cli {

/// Malformed or schema-violating configuration document.
class ConfigError : public UsageError {
 public:
  using UsageError::UsageError;
};

/// Geometry as written in a config document; resolved once the problem
/// dimensions and ‖C‖ are known.
struct GeometrySpec {
  bregman::GeometryKind kind = bregman::GeometryKind::scalar_quadratic;
  std::optional<double> step;             // scalar_quadratic: τ
  std::optional<double> step_over_norm;   // scalar_quadratic: τ = value/‖C‖
  std::optional<Vector> weights;          // diagonal_quadratic
  double quartic = 0.0;                   // separable_smooth
  double quadratic = 1.0;                 // separable_smooth
};

struct ProblemSpec {
  std::string name;
  nlohmann::json params;
};

struct RunConfig {
  ProblemSpec problem;
  GeometrySpec geometry1;
  GeometrySpec geometry2;
  long max_iter = 10000;
  double residual_tol = 1e-10;
  long record_every = 10;
  std::uint64_t seed = 0;
  std::string output_path = "trace.csv";
  bool override_certificate = false;
};

/// Parses a JSON run configuration. Unknown keys are rejected; errors name
/// the line (syntax) or the field path (schema).
RunConfig parse_config(std::string_view text);

/// Problem, solver configuration and certificate assembled from a RunConfig.
struct ResolvedRun {
  problems::ProblemInstance problem;
  solver::SolverConfig solver;
  bregman::AlphaCertificate certificate;
};

ResolvedRun resolve(const RunConfig& config);

/// CSV with header
/// n,primal_residual,dual_residual,lyapunov,ergodic_gap_lhs,ergodic_gap_rhs,dist_to_ref,objective_gap
/// and empty fields for absent metrics.
void write_csv(const Trace& trace, std::ostream& out);

/// Rows breaking Lyapunov monotonicity or the ergodic sandwich
/// 0 ≤ lhs ≤ rhs, as human-readable descriptions.
std::vector<std::string> check_trace_invariants(const Trace& trace);

/// Solves and writes the CSV to config.output_path and a summary to `out`.
/// Returns 0 when converged, 2 when the iteration budget ran out, 1 on error.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Prints ‖C‖, moduli, α and a sampled check of the joint condition.
/// Returns 0 iff the certificate is valid.
int certify_command(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace pdhg::cli
