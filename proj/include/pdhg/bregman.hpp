#pragma once

#include "pdhg/hilbert.hpp"
#include "pdhg/monotone.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace pdhg::bregman {

inline constexpr double kDefaultInnerTol = 1e-12;
inline constexpr int kSeparableIterationCap = 200;

/// One coordinate of a separable potential: a C¹ convex scalar function with
/// closed-form derivative and a strong-convexity modulus m (ψ'' ≥ m).
struct ScalarPotential {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  double modulus;
};

/// ψ(s) = quartic·s⁴/4 + quadratic·s²/2, modulus `quadratic`.
ScalarPotential quartic_potential(double quartic, double quadratic);

enum class GeometryKind { scalar_quadratic, diagonal_quadratic, separable_smooth };

std::string to_string(GeometryKind kind);

/// Distance-generating function ψ with its gradient and Bregman divergence
/// D(x, x̄) = ψ(x) − ψ(x̄) − ⟨∇ψ(x̄), x − x̄⟩.
class Geometry {
 public:
  /// ψ = ‖·‖²/(2τ).
  static Geometry scalar_quadratic(Eigen::Index dim, double tau);
  /// ψ = ½⟨·, W·⟩.
  static Geometry diagonal_quadratic(Vector weights);
  /// ψ = Σᵢ ψᵢ(xᵢ).
  static Geometry separable_smooth(std::vector<ScalarPotential> potentials);

  GeometryKind kind() const noexcept { return kind_; }
  Eigen::Index dim() const noexcept { return dim_; }

  /// τ of a scalar_quadratic geometry.
  double step() const;
  /// Diagonal W of a quadratic geometry (1/τ broadcast for scalar_quadratic).
  Vector weights() const;
  const std::vector<ScalarPotential>& potentials() const;

  /// Largest g with D(x, x̄) ≥ g‖x − x̄‖² that we can certify:
  /// 1/(2τ), min(w)/2, or min(mᵢ)/2.
  double modulus() const;

  double psi(const Vector& x) const;
  Vector grad_psi(const Vector& x) const;
  double divergence(const Vector& x, const Vector& xbar) const;

  std::string describe() const;

 private:
  Geometry(GeometryKind kind, Eigen::Index dim) : kind_(kind), dim_(dim) {}

  GeometryKind kind_;
  Eigen::Index dim_;
  double tau_ = 0.0;
  Vector weights_;
  std::shared_ptr<const std::vector<ScalarPotential>> potentials_;
};

inline double divergence(const Geometry& g, const Vector& x, const Vector& xbar) {
  return g.divergence(x, xbar);
}
inline Vector grad_psi(const Geometry& g, const Vector& x) { return g.grad_psi(x); }

/// Solves ∇ψ(x̂) − ∇ψ(x̄) + M x̂ ∋ z.
///
/// Quadratic geometries reduce to plain or diagonal resolvents. Separable
/// geometries require a separable operator and solve each coordinate by a
/// safeguarded bracketing root-find over the graph parametrization
/// s ↦ (J(s), s − J(s)). The result is checked against the inclusion residual
/// before returning.
Vector generalized_resolvent(const Geometry& g, const monotone::MonotoneMap& m,
                             const Vector& xbar, const Vector& z,
                             double tol = kDefaultInnerTol);

/// ‖x̂ − J₁(x̂ + z + ∇ψ(x̄) − ∇ψ(x̂))‖∞.
double generalized_resolvent_residual(const Geometry& g, const monotone::MonotoneMap& m,
                                      const Vector& xbar, const Vector& z, const Vector& xhat);

struct AlphaCertificate {
  double alpha = 0.0;
  double norm_C = 0.0;
  double geom1_modulus = 0.0;
  double geom2_modulus = 0.0;
  bool valid = false;
};

/// Smallest eigenvalue of [[g₁, −‖C‖/2], [−‖C‖/2, g₂]]. Valid when it exceeds
/// 1e-12·max(g₁, g₂); below that the sign is rounding noise.
AlphaCertificate certify_alpha(const Geometry& g1, const Geometry& g2, double norm_C);

struct JointConditionReport {
  int samples = 0;
  double min_value = 0.0;
  int violations = 0;
};

/// Samples D₁(x,x̄) + D₂(y,ȳ) − ⟨C(x−x̄), y−ȳ⟩ − α(‖x−x̄‖² + ‖y−ȳ‖²) on seeded
/// random tuples; a violation is a value below −1e-10.
JointConditionReport check_joint_condition(const Geometry& g1, const Geometry& g2,
                                           const hilbert::LinearMap& C, double alpha,
                                           int samples, std::uint64_t seed);

}  // namespace pdhg::bregman
