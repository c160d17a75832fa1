#pragma once

#include "pdhg/hilbert.hpp"
#include "pdhg/monotone.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pdhg::problems {

/// f₁, f₂ and their conjugates for subdifferential instances, A = ∂f₁ and
/// B = ∂f₂ (so B⁻¹ = ∂f₂*).
struct FunctionValues {
  std::function<double(const Vector&)> f1;
  std::function<double(const Vector&)> f2;
  std::function<double(const Vector&)> f1_conj;
  std::function<double(const Vector&)> f2_conj;
};

struct Reference {
  Vector x;
  Vector y;
  std::string provenance;
};

/// Data of the inclusion pair 0 ∈ Ax + C*(B(Cx)), stored as (A, B⁻¹, C).
/// Immutable after construction.
class ProblemInstance {
 public:
  /// Validates dimensions and, when a reference is given, that its KKT
  /// residual is at most 1e-8.
  static ProblemInstance make(std::string name, monotone::MonotoneMap A,
                              monotone::MonotoneMap Binv, hilbert::LinearMap C,
                              std::optional<FunctionValues> function_values = std::nullopt,
                              std::optional<Reference> reference = std::nullopt);

  const std::string& name() const noexcept { return name_; }
  const monotone::MonotoneMap& A() const noexcept { return A_; }
  const monotone::MonotoneMap& Binv() const noexcept { return Binv_; }
  const hilbert::LinearMap& C() const noexcept { return C_; }
  Eigen::Index primal_dim() const noexcept { return C_.input_dim(); }
  Eigen::Index dual_dim() const noexcept { return C_.output_dim(); }

  const std::optional<FunctionValues>& function_values() const noexcept { return fv_; }
  const std::optional<Reference>& reference() const noexcept { return ref_; }

 private:
  ProblemInstance(std::string name, monotone::MonotoneMap A, monotone::MonotoneMap Binv,
                  hilbert::LinearMap C, std::optional<FunctionValues> fv,
                  std::optional<Reference> ref)
      : name_(std::move(name)),
        A_(std::move(A)),
        Binv_(std::move(Binv)),
        C_(std::move(C)),
        fv_(std::move(fv)),
        ref_(std::move(ref)) {}

  std::string name_;
  monotone::MonotoneMap A_;
  monotone::MonotoneMap Binv_;
  hilbert::LinearMap C_;
  std::optional<FunctionValues> fv_;
  std::optional<Reference> ref_;
};

/// Function values assembled from the operators' closed forms; requires both
/// operators to be subdifferentials.
FunctionValues function_values_from(const monotone::MonotoneMap& A,
                                     const monotone::MonotoneMap& Binv);

/// ‖x − J_A(x − C*y)‖ + ‖y − J_{B⁻¹}(y + Cx)‖ with unit steps.
double kkt_residual(const ProblemInstance& p, const Vector& x, const Vector& y);

/// Catalog ids accepted by build().
const std::vector<std::string>& catalog_names();

/// Builds a catalog entry from a JSON parameter object. Unknown names,
/// missing or unexpected parameters raise UsageError describing the schema.
ProblemInstance build(std::string_view name, const nlohmann::json& params);

/// A = ∂½‖· − a‖², f₂ = ½‖· − b‖².
ProblemInstance toy_quadratic(const Vector& a, const Vector& b, const Matrix& C);
/// f₁ = λ‖·‖₁, f₂ = ½‖· − b‖².
ProblemInstance lasso(const Matrix& C, const Vector& b, double lambda);
/// f₁ = ½‖· − b‖², f₂ = λ‖·‖₁, C = forward difference.
ProblemInstance tv_denoise_1d(const Vector& b, double lambda);
/// min over x ∈ Δ of max over y ∈ Δ of ⟨payoff·x, y⟩.
ProblemInstance matrix_game(const Matrix& payoff);
/// A = I + K with K skew, B⁻¹ = 0.
ProblemInstance skew_inclusion(const Matrix& K, const Matrix& C);

/// The stored reference (x*, y*). Throws UnsupportedCapability when the entry
/// ships none.
std::pair<Vector, Vector> reference_solution(const ProblemInstance& p);

/// Proximal-gradient oracle for min λ‖x‖₁ + ½‖Cx − b‖². Throws NotConverged.
Vector lasso_oracle(const Matrix& C, const Vector& b, double lambda, double tol = 1e-13,
                    long max_iter = 2'000'000);

/// Projected-gradient oracle on the dual of min ½‖x − b‖² + λ‖Dx‖₁; returns
/// the dual solution y*, with x* = b − D*y*.
Vector tv_dual_oracle(const Vector& b, double lambda, double tol = 1e-13,
                      long max_iter = 5'000'000);

/// True when each row of a square matrix is the previous row shifted right.
bool is_circulant(const Matrix& m);

}  // namespace pdhg::problems
