#pragma once

#include "pdhg/bregman.hpp"
#include "pdhg/hilbert.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pdhg {

/// Iterate of the primal-dual scheme. Ergodic sums start at n = 1, so the
/// initial point never enters the averages and ergodic_count == n.
struct SolverState {
  long n = 0;
  Vector x;
  Vector y;
  Vector x_prev;
  Vector y_prev;
  Vector ergodic_sum_x;
  Vector ergodic_sum_y;
  long ergodic_count = 0;

  static SolverState initial(const Vector& x0, const Vector& y0);
};

/// One diagnostics record. Optional fields are absent when the problem lacks
/// the oracle or function values they need.
struct MetricsRow {
  long n = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  std::optional<double> lyapunov;
  std::optional<double> ergodic_gap_lhs;
  std::optional<double> ergodic_gap_rhs;
  std::optional<double> dist_to_ref;
  std::optional<double> objective_gap;
};

struct ErgodicSnapshot {
  long n = 0;
  Vector x;
  Vector y;
};

enum class Termination { converged, max_iter, error };

std::string to_string(Termination t);

struct Trace {
  std::vector<MetricsRow> rows;
  /// Ergodic averages (X^N, Y^N) at every recorded row.
  std::vector<ErgodicSnapshot> ergodic;
  SolverState final_state;
  Termination termination = Termination::max_iter;
  std::string error_message;
  bool certified = false;
  bregman::AlphaCertificate certificate;
  Vector x0;
  Vector y0;
};

}  // namespace pdhg
