#include "pdhg/diagnostics.hpp"

#include "pdhg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pdhg {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iter: return "max_iter";
    case Termination::error: return "error";
  }
  return "unknown";
}

namespace diagnostics {

using problems::ProblemInstance;

void validate_witness(const ProblemInstance& p, const GapWitness& w) {
  hilbert::require_dim(w.x, p.primal_dim(), "witness x");
  hilbert::require_dim(w.u, p.primal_dim(), "witness u");
  hilbert::require_dim(w.y, p.dual_dim(), "witness y");
  hilbert::require_dim(w.v, p.dual_dim(), "witness v");
  const double rx = monotone::graph_residual(p.A(), {w.x, w.u});
  const double ry = monotone::graph_residual(p.Binv(), {w.y, w.v});
  if (!(rx <= kWitnessTol) || !(ry <= kWitnessTol)) {
    std::ostringstream msg;
    msg << "invalid gap witness: graph residuals " << rx << " (A), " << ry << " (B^-1)";
    throw UsageError(msg.str());
  }
}

std::optional<GapWitness> solution_witness(const ProblemInstance& p) {
  if (!p.reference()) return std::nullopt;
  const auto& ref = *p.reference();
  return GapWitness{ref.x, ref.y, -p.C().adjoint_apply(ref.y), p.C().apply(ref.x)};
}

GapWitness resolvent_witness(const ProblemInstance& p, const Vector& zeta, const Vector& eta) {
  hilbert::require_dim(zeta, p.primal_dim(), "resolvent_witness zeta");
  hilbert::require_dim(eta, p.dual_dim(), "resolvent_witness eta");
  const Vector zx = zeta - p.C().adjoint_apply(eta);
  const Vector zy = eta + p.C().apply(zeta);
  Vector x = monotone::resolvent(p.A(), 1.0, zx);
  Vector y = monotone::resolvent(p.Binv(), 1.0, zy);
  Vector u = zx - x;
  Vector v = zy - y;
  return {std::move(x), std::move(y), std::move(u), std::move(v)};
}

double gap_lower_bound(const ProblemInstance& p, const GapWitness& w, const Vector& zeta,
                       const Vector& eta) {
  validate_witness(p, w);
  hilbert::require_dim(zeta, p.primal_dim(), "gap_lower_bound zeta");
  hilbert::require_dim(eta, p.dual_dim(), "gap_lower_bound eta");
  return (zeta - w.x).dot(w.u) + (eta - w.y).dot(w.v) - p.C().apply(w.x).dot(eta) +
         p.C().apply(zeta).dot(w.y);
}

double objective_gap(const ProblemInstance& p, const Vector& zeta, const Vector& eta) {
  if (!p.function_values())
    throw UnsupportedCapability("objective_gap: problem '" + p.name() +
                                "' is not function-valued");
  hilbert::require_dim(zeta, p.primal_dim(), "objective_gap zeta");
  hilbert::require_dim(eta, p.dual_dim(), "objective_gap eta");
  const auto& f = *p.function_values();
  const double primal = f.f1(zeta) + f.f2(p.C().apply(zeta));
  const double dual = -f.f1_conj(-p.C().adjoint_apply(eta)) - f.f2_conj(eta);
  return primal - dual;
}

double lyapunov(const ProblemInstance& p, const Vector& ref_x, const Vector& ref_y,
                const Vector& x, const Vector& y, const bregman::Geometry& g1,
                const bregman::Geometry& g2) {
  const Vector dx = ref_x - x;
  const Vector dy = ref_y - y;
  return g1.divergence(ref_x, x) + g2.divergence(ref_y, y) - p.C().apply(dx).dot(dy);
}

GapCertificate ergodic_gap_certificate(const ProblemInstance& p, const GapWitness& w,
                                       const bregman::Geometry& g1, const bregman::Geometry& g2,
                                       const Vector& x0, const Vector& y0, const Vector& X,
                                       const Vector& Y, long N) {
  if (N < 1) throw UsageError("ergodic_gap_certificate: N must be >= 1");
  GapCertificate c;
  c.lhs = gap_lower_bound(p, w, X, Y);
  c.rhs = lyapunov(p, w.x, w.y, x0, y0, g1, g2) / static_cast<double>(N);
  return c;
}

GapCertificate ergodic_gap_certificate(const Trace& trace, const ProblemInstance& p,
                                       const GapWitness& w, const bregman::Geometry& g1,
                                       const bregman::Geometry& g2, const Vector& x0,
                                       const Vector& y0, long N) {
  const auto it = std::find_if(trace.ergodic.begin(), trace.ergodic.end(),
                               [N](const ErgodicSnapshot& s) { return s.n == N; });
  if (it == trace.ergodic.end()) {
    std::ostringstream msg;
    msg << "ergodic_gap_certificate: no ergodic snapshot recorded at N = " << N;
    throw UsageError(msg.str());
  }
  return ergodic_gap_certificate(p, w, g1, g2, x0, y0, it->x, it->y, N);
}

std::pair<double, double> fixed_point_residual(const ProblemInstance& p, const SolverState& s,
                                               const bregman::Geometry& g1,
                                               const bregman::Geometry& g2) {
  if (s.n < 1) throw UsageError("fixed_point_residual: no step has been taken");
  const Vector x_tilde = 2.0 * s.x - s.x_prev;
  const Vector rp =
      g1.grad_psi(s.x_prev) - g1.grad_psi(s.x) - p.C().adjoint_apply(s.y_prev - s.y);
  const Vector rd = g2.grad_psi(s.y_prev) - g2.grad_psi(s.y) + p.C().apply(x_tilde - s.x);
  return {rp.norm(), rd.norm()};
}

MetricsRow compute_metrics(const ProblemInstance& p, const SolverState& s,
                           const bregman::Geometry& g1, const bregman::Geometry& g2,
                           const Vector& x0, const Vector& y0) {
  MetricsRow row;
  row.n = s.n;
  if (s.n >= 1) std::tie(row.primal_residual, row.dual_residual) = fixed_point_residual(p, s, g1, g2);

  if (const auto w = solution_witness(p)) {
    row.lyapunov = lyapunov(p, w->x, w->y, s.x, s.y, g1, g2);
    row.dist_to_ref = std::sqrt((s.x - w->x).squaredNorm() + (s.y - w->y).squaredNorm());
    if (s.ergodic_count >= 1) {
      const double n = static_cast<double>(s.ergodic_count);
      const auto cert = ergodic_gap_certificate(p, *w, g1, g2, x0, y0, s.ergodic_sum_x / n,
                                                s.ergodic_sum_y / n, s.ergodic_count);
      row.ergodic_gap_lhs = cert.lhs;
      row.ergodic_gap_rhs = cert.rhs;
    }
  }
  if (p.function_values()) row.objective_gap = objective_gap(p, s.x, s.y);
  return row;
}

std::optional<double> field_value(const MetricsRow& row, MetricField field) {
  switch (field) {
    case MetricField::primal_residual: return row.primal_residual;
    case MetricField::dual_residual: return row.dual_residual;
    case MetricField::lyapunov: return row.lyapunov;
    case MetricField::ergodic_gap_lhs: return row.ergodic_gap_lhs;
    case MetricField::ergodic_gap_rhs: return row.ergodic_gap_rhs;
    case MetricField::dist_to_ref: return row.dist_to_ref;
    case MetricField::objective_gap: return row.objective_gap;
  }
  return std::nullopt;
}

Window default_window(std::span<const MetricsRow> rows) {
  if (rows.empty()) throw UsageError("default_window: no rows");
  const std::size_t skip = rows.size() / 5;
  return {rows[skip].n, rows.back().n};
}

double rate_fit(std::span<const MetricsRow> rows, MetricField field, Window window) {
  std::vector<double> lx, ly;
  std::ostringstream bad;
  int bad_count = 0;
  for (const auto& row : rows) {
    if (row.n < window.n_lo || row.n > window.n_hi) continue;
    const auto v = field_value(row, field);
    if (!v || !(*v > 0.0) || row.n < 1) {
      bad << (bad_count++ ? ", " : "") << row.n;
      continue;
    }
    lx.push_back(std::log(static_cast<double>(row.n)));
    ly.push_back(std::log(*v));
  }
  if (bad_count > 0)
    throw UsageError("rate_fit: absent or nonpositive values at rows n = " + bad.str());
  if (lx.size() < 2) throw UsageError("rate_fit: need at least two rows in the window");

  const double k = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw UsageError("rate_fit: window contains a single distinct n");
  return sxy / sxx;
}

}  // namespace diagnostics
}  // namespace pdhg
