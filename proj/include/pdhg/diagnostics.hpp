#pragma once

#include "pdhg/bregman.hpp"
#include "pdhg/problems.hpp"
#include "pdhg/state.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>

namespace pdhg::diagnostics {

/// Graph elements (x, u) ∈ gra A and (y, v) ∈ gra B⁻¹.
struct GapWitness {
  Vector x;
  Vector y;
  Vector u;
  Vector v;
};

/// Graph-membership tolerance for witnesses.
inline constexpr double kWitnessTol = 1e-8;

/// Throws UsageError when either pair is off its graph by more than 1e-8.
void validate_witness(const problems::ProblemInstance& p, const GapWitness& w);

/// (x*, y*, −C*y*, Cx*) from the stored reference; nullopt when the problem
/// ships no reference.
std::optional<GapWitness> solution_witness(const problems::ProblemInstance& p);

/// Witness from unit resolvents at (ζ, η): x = J_A(ζ − C*η), y = J_{B⁻¹}(η + Cζ).
/// Its lower bound equals ‖ζ − x‖² + ‖η − y‖², a squared inclusion residual.
GapWitness resolvent_witness(const problems::ProblemInstance& p, const Vector& zeta,
                             const Vector& eta);

/// ⟨ζ − x, u⟩ + ⟨η − y, v⟩ − ⟨Cx, η⟩ + ⟨Cζ, y⟩, a lower bound on the
/// restricted gap function at (x, ζ; y, η).
double gap_lower_bound(const problems::ProblemInstance& p, const GapWitness& w,
                       const Vector& zeta, const Vector& eta);

/// f₁(ζ) + f₂(Cζ) + f₁*(−C*η) + f₂*(η). May be +∞ off the domains.
double objective_gap(const problems::ProblemInstance& p, const Vector& zeta, const Vector& eta);

/// D₁(x_ref, x) + D₂(y_ref, y) − ⟨C(x_ref − x), y_ref − y⟩.
double lyapunov(const problems::ProblemInstance& p, const Vector& ref_x, const Vector& ref_y,
                const Vector& x, const Vector& y, const bregman::Geometry& g1,
                const bregman::Geometry& g2);

struct GapCertificate {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Evaluates both sides of 𝓛(x, X^N; y, Y^N) ≤ Δ(x, y; x⁰, y⁰)/N using the
/// witness for the left side and the snapshot of step N from the trace.
GapCertificate ergodic_gap_certificate(const Trace& trace, const problems::ProblemInstance& p,
                                       const GapWitness& w, const bregman::Geometry& g1,
                                       const bregman::Geometry& g2, const Vector& x0,
                                       const Vector& y0, long N);

/// Same bound evaluated directly at given ergodic averages.
GapCertificate ergodic_gap_certificate(const problems::ProblemInstance& p, const GapWitness& w,
                                       const bregman::Geometry& g1, const bregman::Geometry& g2,
                                       const Vector& x0, const Vector& y0, const Vector& X,
                                       const Vector& Y, long N);

/// Inclusion residuals of the last step, rearranged from the step equations:
///   primal ‖∇ψ₁(xⁿ) − ∇ψ₁(xⁿ⁺¹) − C*(yⁿ − yⁿ⁺¹)‖,
///   dual   ‖∇ψ₂(yⁿ) − ∇ψ₂(yⁿ⁺¹) + C(x̃ⁿ⁺¹ − xⁿ⁺¹)‖.
/// Both vanish exactly at fixed points.
std::pair<double, double> fixed_point_residual(const problems::ProblemInstance& p,
                                               const SolverState& s, const bregman::Geometry& g1,
                                               const bregman::Geometry& g2);

/// Full metrics row for the current state.
MetricsRow compute_metrics(const problems::ProblemInstance& p, const SolverState& s,
                           const bregman::Geometry& g1, const bregman::Geometry& g2,
                           const Vector& x0, const Vector& y0);

enum class MetricField {
  primal_residual,
  dual_residual,
  lyapunov,
  ergodic_gap_lhs,
  ergodic_gap_rhs,
  dist_to_ref,
  objective_gap,
};

std::optional<double> field_value(const MetricsRow& row, MetricField field);

struct Window {
  long n_lo;
  long n_hi;
};

/// Tail window covering the last 80% of the recorded rows.
Window default_window(std::span<const MetricsRow> rows);

/// Least-squares slope of log(value) against log(n) over rows with n in
/// [n_lo, n_hi]. Throws UsageError listing rows whose value is absent or
/// nonpositive, or when fewer than two rows fall in the window.
double rate_fit(std::span<const MetricsRow> rows, MetricField field, Window window);

}  // namespace pdhg::diagnostics
