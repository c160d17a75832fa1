#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <variant>

namespace pdhg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace hilbert {

/// Standard Euclidean inner product. Throws UsageError on dimension mismatch.
double inner(const Vector& a, const Vector& b);

/// True when every coordinate is finite.
bool all_finite(const Vector& v);

/// Throws UsageError naming `what` if `v` has the wrong dimension.
void require_dim(const Vector& v, Eigen::Index dim, const std::string& what);

/// Bounded linear map between coordinate spaces, exposed through forward
/// and adjoint application. Immutable; copies share structure.
///
/// Structures:
///  - dense matrix,
///  - diagonal scaling,
///  - 1-D forward difference with zero padding, (Dx)_i = x_{i+1} - x_i and
///    (Dx)_{n-1} = -x_{n-1},
///  - composition `outer ∘ inner`,
///  - scalar multiple.
class LinearMap {
 public:
  static LinearMap dense(Matrix m);
  static LinearMap diagonal(Vector d);
  static LinearMap identity(Eigen::Index n);
  static LinearMap forward_difference(Eigen::Index n);
  /// outer ∘ inner, i.e. x ↦ outer(inner(x)).
  static LinearMap compose(const LinearMap& outer, const LinearMap& inner);
  static LinearMap scaled(double factor, const LinearMap& map);

  Eigen::Index input_dim() const noexcept { return in_; }
  Eigen::Index output_dim() const noexcept { return out_; }

  Vector apply(const Vector& x) const;
  Vector adjoint_apply(const Vector& y) const;

  /// Materializes the map as a rows × cols matrix.
  Matrix to_dense() const;

  std::string describe() const;

 private:
  struct Dense {
    Matrix m;
  };
  struct Diagonal {
    Vector d;
  };
  struct ForwardDifference {};
  struct Compose {
    std::shared_ptr<const LinearMap> outer;
    std::shared_ptr<const LinearMap> inner;
  };
  struct Scaled {
    double factor;
    std::shared_ptr<const LinearMap> map;
  };
  using Node = std::variant<Dense, Diagonal, ForwardDifference, Compose, Scaled>;

  LinearMap(Node node, Eigen::Index in, Eigen::Index out)
      : node_(std::make_shared<const Node>(std::move(node))), in_(in), out_(out) {}

  Vector forward_unchecked(const Vector& x) const;
  Vector adjoint_unchecked(const Vector& y) const;

  std::shared_ptr<const Node> node_;
  Eigen::Index in_;
  Eigen::Index out_;
};

inline Vector apply(const LinearMap& map, const Vector& x) { return map.apply(x); }
inline Vector adjoint_apply(const LinearMap& map, const Vector& y) {
  return map.adjoint_apply(y);
}

/// Estimates ‖L‖ by power iteration on L*L from a seeded Gaussian start.
///
/// Stops once the eigen-residual ‖L*Lv − μv‖ of the normalized iterate v
/// with Rayleigh quotient μ drops to tol·(1+μ); returns sqrt(μ). The Rayleigh
/// quotients are nondecreasing across iterations. Throws NotConverged with the
/// last estimate when `max_iter` is exhausted.
double operator_norm_estimate(const LinearMap& map, double tol, int max_iter,
                              std::uint64_t seed);

}  // namespace hilbert
}  // namespace pdhg
