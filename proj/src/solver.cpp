#include "pdhg/solver.hpp"

#include "pdhg/errors.hpp"

#include <cmath>
#include <sstream>

namespace pdhg {

SolverState SolverState::initial(const Vector& x0, const Vector& y0) {
  if (!x0.allFinite() || !y0.allFinite()) throw UsageError("initial point must be finite");
  SolverState s;
  s.x = x0;
  s.y = y0;
  s.x_prev = x0;
  s.y_prev = y0;
  s.ergodic_sum_x = Vector::Zero(x0.size());
  s.ergodic_sum_y = Vector::Zero(y0.size());
  return s;
}

namespace solver {

namespace {

void check_state(const SolverState& s, const problems::ProblemInstance& p) {
  hilbert::require_dim(s.x, p.primal_dim(), "state x");
  hilbert::require_dim(s.y, p.dual_dim(), "state y");
  hilbert::require_dim(s.ergodic_sum_x, p.primal_dim(), "state ergodic_sum_x");
  hilbert::require_dim(s.ergodic_sum_y, p.dual_dim(), "state ergodic_sum_y");
}

SolverState advance(const SolverState& s, Vector x_next, Vector y_next) {
  if (!x_next.allFinite() || !y_next.allFinite())
    throw StepError("non-finite iterate", s.n + 1);
  SolverState out;
  out.n = s.n + 1;
  out.x_prev = s.x;
  out.y_prev = s.y;
  out.ergodic_sum_x = s.ergodic_sum_x + x_next;
  out.ergodic_sum_y = s.ergodic_sum_y + y_next;
  out.ergodic_count = s.ergodic_count + 1;
  out.x = std::move(x_next);
  out.y = std::move(y_next);
  return out;
}

}  // namespace

void validate(const SolverConfig& config, const problems::ProblemInstance& p) {
  if (config.max_iter < 1) throw UsageError("solver config: max_iter must be >= 1");
  if (!(config.residual_tol > 0.0)) throw UsageError("solver config: residual_tol must be > 0");
  if (!(config.inner_tol > 0.0)) throw UsageError("solver config: inner_tol must be > 0");
  if (config.record_every < 1) throw UsageError("solver config: record_every must be >= 1");
  if (config.geometry1.dim() != p.primal_dim() || config.geometry2.dim() != p.dual_dim())
    throw UsageError("solver config: geometry dimensions do not match the problem");
}

double estimate_norm(const hilbert::LinearMap& C, std::uint64_t seed) {
  return hilbert::operator_norm_estimate(C, 1e-12, 100000, seed);
}

bregman::AlphaCertificate certify(const problems::ProblemInstance& p,
                                  const SolverConfig& config) {
  return bregman::certify_alpha(config.geometry1, config.geometry2,
                                estimate_norm(p.C(), config.seed));
}

SolverState step(const SolverState& state, const problems::ProblemInstance& p,
                 const SolverConfig& config) {
  check_state(state, p);
  try {
    Vector x_next = bregman::generalized_resolvent(config.geometry1, p.A(), state.x,
                                                   -p.C().adjoint_apply(state.y),
                                                   config.inner_tol);
    const Vector x_tilde = 2.0 * x_next - state.x;
    Vector y_next = bregman::generalized_resolvent(config.geometry2, p.Binv(), state.y,
                                                   p.C().apply(x_tilde), config.inner_tol);
    return advance(state, std::move(x_next), std::move(y_next));
  } catch (const StepError&) {
    throw;
  } catch (const std::exception& e) {
    std::ostringstream msg;
    msg << "step " << state.n + 1 << ": " << e.what();
    throw StepError(msg.str(), state.n + 1);
  }
}

SolverState reference_step(const SolverState& state, const problems::ProblemInstance& p,
                           double tau, double sigma) {
  check_state(state, p);
  Vector x_next = monotone::resolvent(p.A(), tau, state.x - tau * p.C().adjoint_apply(state.y));
  const Vector x_tilde = 2.0 * x_next - state.x;
  const Vector z = state.y + sigma * p.C().apply(x_tilde);
  Vector y_next = p.Binv().kind() == monotone::Kind::inverse_of
                      ? monotone::inverse_resolvent(p.Binv().inner(), sigma, z)
                      : monotone::resolvent(p.Binv(), sigma, z);
  return advance(state, std::move(x_next), std::move(y_next));
}

std::pair<Vector, Vector> ergodic_average(const SolverState& state) {
  if (state.ergodic_count < 1) throw UsageError("ergodic_average: no step has been taken");
  const double n = static_cast<double>(state.ergodic_count);
  return {state.ergodic_sum_x / n, state.ergodic_sum_y / n};
}

Trace run(const problems::ProblemInstance& p, const SolverConfig& config, const Vector& x0,
          const Vector& y0) {
  validate(config, p);
  hilbert::require_dim(x0, p.primal_dim(), "run x0");
  hilbert::require_dim(y0, p.dual_dim(), "run y0");

  Trace trace;
  trace.certificate = certify(p, config);
  trace.certified = trace.certificate.valid;
  if (!trace.certified && !config.override_certificate) {
    std::ostringstream msg;
    msg << "step sizes violate the joint condition (alpha = " << trace.certificate.alpha
        << " <= 0; for scalar geometries this means tau*sigma*|C|^2 >= 1); "
        << "set override_certificate to run anyway";
    throw UsageError(msg.str());
  }
  trace.x0 = x0;
  trace.y0 = y0;

  const auto& g1 = config.geometry1;
  const auto& g2 = config.geometry2;
  auto record = [&](const SolverState& s) {
    if (!trace.rows.empty() && trace.rows.back().n == s.n) return;
    trace.rows.push_back(diagnostics::compute_metrics(p, s, g1, g2, x0, y0));
    if (s.ergodic_count >= 1) {
      auto [X, Y] = ergodic_average(s);
      trace.ergodic.push_back({s.n, std::move(X), std::move(Y)});
    }
  };

  SolverState state = SolverState::initial(x0, y0);
  trace.termination = Termination::max_iter;
  try {
    while (state.n < config.max_iter) {
      state = step(state, p, config);
      const auto [rp, rd] = diagnostics::fixed_point_residual(p, state, g1, g2);
      if (rp <= config.residual_tol && rd <= config.residual_tol) {
        trace.termination = Termination::converged;
        break;
      }
      if (state.n % config.record_every == 0) record(state);
    }
    record(state);
  } catch (const std::exception& e) {
    trace.termination = Termination::error;
    trace.error_message = e.what();
    if (trace.rows.empty()) {
      try {
        record(state);
      } catch (const std::exception&) {
        MetricsRow row;
        row.n = state.n;
        trace.rows.push_back(row);
      }
    }
  }
  trace.final_state = std::move(state);
  return trace;
}

}  // namespace solver
}  // namespace pdhg
