#pragma once

#include "pdhg/hilbert.hpp"

#include <memory>
#include <string>
#include <variant>

namespace pdhg::monotone {

/// Absolute tolerance for set membership in indicator values.
inline constexpr double kMembershipTol = 1e-9;

enum class Kind {
  zero,
  linear,
  l1_scaled,
  quadratic_shift,
  box_normal_cone,
  simplex_normal_cone,
  inverse_of,
};

std::string to_string(Kind kind);

/// Maximally monotone operator, accessed only through its resolvents.
///
/// The catalog covers subdifferentials (l1 norm, shifted quadratic,
/// indicators of boxes and the unit simplex, the zero map), the affine map
/// x ↦ (S + K)x with S symmetric positive semidefinite and K skew, and
/// inverses of any of these. Descriptors are immutable values.
class MonotoneMap {
 public:
  static MonotoneMap zero(Eigen::Index dim);
  /// x ↦ (S + K)x. Validates S symmetric PSD and K skew to 1e-12.
  static MonotoneMap linear(Matrix S, Matrix K);
  /// ∂(λ‖·‖₁).
  static MonotoneMap l1_scaled(Eigen::Index dim, double lambda);
  /// z ↦ z − b, the gradient of ½‖· − b‖².
  static MonotoneMap quadratic_shift(Vector b);
  /// Normal cone of {l ≤ x ≤ u}; infinite bounds allowed.
  static MonotoneMap box_normal_cone(Vector lower, Vector upper);
  /// Normal cone of the unit simplex {x ≥ 0, Σx = 1}.
  static MonotoneMap simplex_normal_cone(Eigen::Index dim);
  static MonotoneMap inverse_of(const MonotoneMap& inner);

  Eigen::Index dim() const noexcept { return dim_; }
  Kind kind() const noexcept;

  bool has_diagonal_resolvent() const;
  bool has_function_value() const;
  /// Acts coordinate-wise, so scalar resolvents per coordinate exist.
  bool is_separable() const;

  // Kind payloads. Each accessor requires the matching kind.
  const Matrix& sym_part() const;
  const Matrix& skew_part() const;
  double lambda() const;
  const Vector& shift() const;
  const Vector& lower() const;
  const Vector& upper() const;
  const MonotoneMap& inner() const;

  std::string describe() const;

 private:
  struct Zero {};
  struct Linear {
    Matrix S;
    Matrix K;
  };
  struct L1 {
    double lambda;
  };
  struct QuadShift {
    Vector b;
  };
  struct Box {
    Vector lower;
    Vector upper;
  };
  struct Simplex {};
  struct Inverse {
    std::shared_ptr<const MonotoneMap> inner;
  };
  using Payload = std::variant<Zero, Linear, L1, QuadShift, Box, Simplex, Inverse>;

  MonotoneMap(Payload payload, Eigen::Index dim)
      : payload_(std::make_shared<const Payload>(std::move(payload))), dim_(dim) {}

  std::shared_ptr<const Payload> payload_;
  Eigen::Index dim_;
};

/// Element of an operator graph: `image` ∈ M(`point`).
struct GraphPoint {
  Vector point;
  Vector image;
};

/// (I + tM)⁻¹ z.
Vector resolvent(const MonotoneMap& m, double t, const Vector& z);

/// (I + sM⁻¹)⁻¹ z via the Moreau identity z − s·(I + M/s)⁻¹(z/s).
/// Rejects the zero map, whose inverse is nowhere single-valued.
Vector inverse_resolvent(const MonotoneMap& m, double s, const Vector& z);

/// Solves W x + M x ∋ W z with W = diag(w), w > 0. Maps without a
/// per-coordinate structure are accepted only with equal weights.
Vector diagonal_resolvent(const MonotoneMap& m, const Vector& w, const Vector& z);

/// Coordinate `i` of (I + tM)⁻¹ for separable operators, applied to scalar s.
double scalar_resolvent(const MonotoneMap& m, Eigen::Index i, double t, double s);

/// Value of the convex function whose subdifferential is `m`, normalized as
/// λ‖x‖₁, ½‖x − b‖², 0/+∞ for indicators, 0 for the zero map. For inverse_of
/// kinds this is the Fenchel conjugate of the inner function.
double function_value(const MonotoneMap& m, const Vector& x);

/// Fenchel conjugate of function_value(m, ·) evaluated at w.
double conjugate_value(const MonotoneMap& m, const Vector& w);

/// Euclidean projection onto the unit simplex.
Vector project_simplex(const Vector& z);

/// Componentwise sign(z)·max(|z| − threshold, 0).
Vector soft_threshold(const Vector& z, double threshold);

/// Graph point produced by one resolvent evaluation: x = J_t(z), image (z − x)/t.
GraphPoint graph_point(const MonotoneMap& m, double t, const Vector& z);

/// ‖point − J₁(point + image)‖, zero exactly on the graph.
double graph_residual(const MonotoneMap& m, const GraphPoint& p);

}  // namespace pdhg::monotone
