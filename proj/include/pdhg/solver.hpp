#pragma once

#include "pdhg/bregman.hpp"
#include "pdhg/diagnostics.hpp"
#include "pdhg/problems.hpp"
#include "pdhg/state.hpp"

#include <cstdint>
#include <utility>

namespace pdhg::solver {

struct SolverConfig {
  bregman::Geometry geometry1;
  bregman::Geometry geometry2;
  long max_iter = 10000;
  double residual_tol = 1e-10;
  double inner_tol = bregman::kDefaultInnerTol;
  long record_every = 10;
  std::uint64_t seed = 0;
  /// Run even when the step-size certificate is invalid; the trace is then
  /// marked uncertified.
  bool override_certificate = false;
};

/// Throws UsageError when a field is out of range or the geometries do not
/// match the problem dimensions.
void validate(const SolverConfig& config, const problems::ProblemInstance& p);

/// Power-iteration estimate of ‖C‖ used for certificates (tol 1e-12).
double estimate_norm(const hilbert::LinearMap& C, std::uint64_t seed);

/// Certificate of the joint strong-convexity condition for this problem and
/// configuration.
bregman::AlphaCertificate certify(const problems::ProblemInstance& p,
                                  const SolverConfig& config);

/// One Bregman PDHG iteration:
///   xⁿ⁺¹ = (∇ψ₁ − ∇ψ₁(xⁿ) + A)⁻¹(−C*yⁿ),
///   x̃ⁿ⁺¹ = 2xⁿ⁺¹ − xⁿ,
///   yⁿ⁺¹ = (∇ψ₂ − ∇ψ₂(yⁿ) + B⁻¹)⁻¹(Cx̃ⁿ⁺¹).
/// Inner failures are rethrown as StepError carrying the iteration index.
SolverState step(const SolverState& state, const problems::ProblemInstance& p,
                 const SolverConfig& config);

/// Euclidean PDHG with plain resolvents:
///   xⁿ⁺¹ = (I + τA)⁻¹(xⁿ − τC*yⁿ),  yⁿ⁺¹ = (I + σB⁻¹)⁻¹(yⁿ + σCx̃ⁿ⁺¹).
/// When B⁻¹ is stored as inverse_of(B) the dual step goes through the Moreau
/// identity on B instead of the direct inverse resolvent.
SolverState reference_step(const SolverState& state, const problems::ProblemInstance& p,
                           double tau, double sigma);

/// (X^N, Y^N). Throws UsageError before the first step.
std::pair<Vector, Vector> ergodic_average(const SolverState& state);

/// Iterates from (x0, y0) until both fixed-point residuals are at most
/// residual_tol or max_iter steps were taken. Records a metrics row and
/// ergodic snapshot every record_every steps and at termination. An invalid
/// certificate without override raises UsageError before any iteration;
/// failures during iteration end the trace with Termination::error.
Trace run(const problems::ProblemInstance& p, const SolverConfig& config, const Vector& x0,
          const Vector& y0);

}  // namespace pdhg::solver
