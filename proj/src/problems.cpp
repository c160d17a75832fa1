#include "pdhg/problems.hpp"

#include "pdhg/errors.hpp"

#include <cmath>
#include <algorithm>
#include <sstream>

namespace pdhg::problems {

namespace {

using monotone::MonotoneMap;
using nlohmann::json;

constexpr double kReferenceKktTol = 1e-8;

struct Schema {
  std::string name;
  std::vector<std::string> required;
  std::string description;
};

const std::vector<Schema>& schemas() {
  static const std::vector<Schema> all = {
      {"toy-quadratic", {"a", "b", "C"}, R"({"a": [n], "b": [m], "C": [[n] x m]})"},
      {"lasso", {"C", "b", "lambda"}, R"({"C": [[n] x m], "b": [m], "lambda": number >= 0})"},
      {"tv-denoise-1d", {"b", "lambda"}, R"({"b": [n], "lambda": number >= 0})"},
      {"matrix-game", {"payoff"}, R"({"payoff": [[n] x m]})"},
      {"skew-inclusion", {"K", "C"}, R"({"K": [[n] x n] skew, "C": [[n] x m]})"},
  };
  return all;
}

[[noreturn]] void schema_error(const Schema& s, const std::string& detail) {
  throw UsageError("problem '" + s.name + "': " + detail + "; expected params " + s.description);
}

Vector parse_vector(const Schema& s, const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) schema_error(s, "'" + key + "' must be a nonempty array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) schema_error(s, "'" + key + "' must contain numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix parse_matrix(const Schema& s, const json& j, const std::string& key) {
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty())
    schema_error(s, "'" + key + "' must be a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      schema_error(s, "'" + key + "' rows must all have the same length");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const json& e = row[static_cast<std::size_t>(c)];
      if (!e.is_number()) schema_error(s, "'" + key + "' must contain numbers");
      m(r, c) = e.get<double>();
    }
  }
  return m;
}

double parse_number(const Schema& s, const json& j, const std::string& key) {
  if (!j.is_number()) schema_error(s, "'" + key + "' must be a number");
  return j.get<double>();
}

void require_dims(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

}  // namespace

ProblemInstance ProblemInstance::make(std::string name, MonotoneMap A, MonotoneMap Binv,
                                      hilbert::LinearMap C, std::optional<FunctionValues> fv,
                                      std::optional<Reference> ref) {
  if (A.dim() != C.input_dim() || Binv.dim() != C.output_dim()) {
    std::ostringstream msg;
    msg << "ProblemInstance '" << name << "': A has dim " << A.dim() << ", B^-1 has dim "
        << Binv.dim() << ", C maps " << C.input_dim() << " -> " << C.output_dim();
    throw UsageError(msg.str());
  }
  ProblemInstance p(std::move(name), std::move(A), std::move(Binv), std::move(C), std::move(fv),
                    std::nullopt);
  if (ref) {
    hilbert::require_dim(ref->x, p.primal_dim(), "reference x");
    hilbert::require_dim(ref->y, p.dual_dim(), "reference y");
    const double r = kkt_residual(p, ref->x, ref->y);
    if (!(r <= kReferenceKktTol)) {
      std::ostringstream msg;
      msg << "ProblemInstance '" << p.name_ << "': reference fails the KKT check (residual " << r
          << ")";
      throw InternalConsistencyError(msg.str());
    }
    p.ref_ = std::move(ref);
  }
  return p;
}

FunctionValues function_values_from(const MonotoneMap& A, const MonotoneMap& Binv) {
  if (!A.has_function_value() || !Binv.has_function_value())
    throw UnsupportedCapability("function values need subdifferential operators");
  return FunctionValues{
      [A](const Vector& x) { return monotone::function_value(A, x); },
      [Binv](const Vector& w) { return monotone::conjugate_value(Binv, w); },
      [A](const Vector& w) { return monotone::conjugate_value(A, w); },
      [Binv](const Vector& y) { return monotone::function_value(Binv, y); },
  };
}

double kkt_residual(const ProblemInstance& p, const Vector& x, const Vector& y) {
  hilbert::require_dim(x, p.primal_dim(), "kkt_residual x");
  hilbert::require_dim(y, p.dual_dim(), "kkt_residual y");
  const Vector jx = monotone::resolvent(p.A(), 1.0, x - p.C().adjoint_apply(y));
  const Vector jy = monotone::resolvent(p.Binv(), 1.0, y + p.C().apply(x));
  return (x - jx).norm() + (y - jy).norm();
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& s : schemas()) out.push_back(s.name);
    return out;
  }();
  return names;
}

ProblemInstance toy_quadratic(const Vector& a, const Vector& b, const Matrix& C) {
  require_dims(C.cols() == a.size() && C.rows() == b.size(),
               "toy-quadratic: C must be len(b) x len(a)");
  auto A = MonotoneMap::quadratic_shift(a);
  auto Binv = MonotoneMap::inverse_of(MonotoneMap::quadratic_shift(b));
  // (I + CᵀC)x* = a + Cᵀb, y* = Cx* − b.
  const Matrix normal = Matrix::Identity(a.size(), a.size()) + C.transpose() * C;
  Vector x = normal.ldlt().solve(a + C.transpose() * b);
  Vector y = C * x - b;
  auto fv = function_values_from(A, Binv);
  return ProblemInstance::make("toy-quadratic", std::move(A), std::move(Binv),
                               hilbert::LinearMap::dense(C), std::move(fv),
                               Reference{std::move(x), std::move(y), "normal equations"});
}

Vector lasso_oracle(const Matrix& C, const Vector& b, double lambda, double tol,
                    long max_iter) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(C.transpose() * C, Eigen::EigenvaluesOnly);
  const double lipschitz = std::max(eig.eigenvalues().maxCoeff(), 1e-300);
  const double step = 1.0 / lipschitz;
  Vector x = Vector::Zero(C.cols());
  double change = 0.0;
  for (long it = 0; it < max_iter; ++it) {
    const Vector grad = C.transpose() * (C * x - b);
    Vector next = monotone::soft_threshold(x - step * grad, step * lambda);
    change = (next - x).lpNorm<Eigen::Infinity>();
    x = std::move(next);
    if (change <= tol) return x;
  }
  throw NotConverged("lasso oracle not converged", change);
}

ProblemInstance lasso(const Matrix& C, const Vector& b, double lambda) {
  require_dims(C.rows() == b.size(), "lasso: C must have len(b) rows");
  if (!(lambda >= 0.0)) throw UsageError("lasso: lambda must be >= 0");
  auto A = MonotoneMap::l1_scaled(C.cols(), lambda);
  auto Binv = MonotoneMap::inverse_of(MonotoneMap::quadratic_shift(b));
  Vector x = lasso_oracle(C, b, lambda);
  Vector y = C * x - b;
  auto fv = function_values_from(A, Binv);
  return ProblemInstance::make("lasso", std::move(A), std::move(Binv),
                               hilbert::LinearMap::dense(C), std::move(fv),
                               Reference{std::move(x), std::move(y), "proximal gradient"});
}

Vector tv_dual_oracle(const Vector& b, double lambda, double tol, long max_iter) {
  const auto D = hilbert::LinearMap::forward_difference(b.size());
  // ‖D‖² ≤ 4 for the zero-padded forward difference.
  const double step = 0.25;
  Vector y = Vector::Zero(b.size());
  double change = 0.0;
  for (long it = 0; it < max_iter; ++it) {
    const Vector grad = D.apply(D.adjoint_apply(y) - b);
    Vector next = (y - step * grad).cwiseMax(-lambda).cwiseMin(lambda);
    change = (next - y).lpNorm<Eigen::Infinity>();
    y = std::move(next);
    if (change <= tol) return y;
  }
  throw NotConverged("tv-denoise-1d oracle not converged", change);
}

ProblemInstance tv_denoise_1d(const Vector& b, double lambda) {
  if (!(lambda >= 0.0)) throw UsageError("tv-denoise-1d: lambda must be >= 0");
  auto C = hilbert::LinearMap::forward_difference(b.size());
  auto A = MonotoneMap::quadratic_shift(b);
  auto Binv = MonotoneMap::inverse_of(MonotoneMap::l1_scaled(b.size(), lambda));
  Vector y = tv_dual_oracle(b, lambda);
  Vector x = b - C.adjoint_apply(y);
  auto fv = function_values_from(A, Binv);
  return ProblemInstance::make("tv-denoise-1d", std::move(A), std::move(Binv), std::move(C),
                               std::move(fv),
                               Reference{std::move(x), std::move(y), "dual projected gradient"});
}

bool is_circulant(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  const auto n = m.rows();
  const double tol = 1e-12 * (1.0 + m.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 1; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(m(i, j) - m(0, (j - i + n) % n)) > tol) return false;
  return true;
}

ProblemInstance matrix_game(const Matrix& payoff) {
  auto A = MonotoneMap::simplex_normal_cone(payoff.cols());
  auto Binv = MonotoneMap::simplex_normal_cone(payoff.rows());
  std::optional<Reference> ref;
  if (is_circulant(payoff)) {
    const auto n = payoff.rows();
    ref = Reference{Vector::Constant(n, 1.0 / static_cast<double>(n)),
                    Vector::Constant(n, 1.0 / static_cast<double>(n)), "cyclic symmetry"};
  }
  auto fv = function_values_from(A, Binv);
  return ProblemInstance::make("matrix-game", std::move(A), std::move(Binv),
                               hilbert::LinearMap::dense(payoff), std::move(fv), std::move(ref));
}

ProblemInstance skew_inclusion(const Matrix& K, const Matrix& C) {
  require_dims(K.rows() == K.cols() && C.cols() == K.rows(),
               "skew-inclusion: K must be square with size equal to the columns of C");
  auto A = MonotoneMap::linear(Matrix::Identity(K.rows(), K.rows()), K);
  auto Binv = MonotoneMap::zero(C.rows());
  return ProblemInstance::make("skew-inclusion", std::move(A), std::move(Binv),
                               hilbert::LinearMap::dense(C), std::nullopt,
                               Reference{Vector::Zero(C.cols()), Vector::Zero(C.rows()),
                                         "zero is the unique solution"});
}

ProblemInstance build(std::string_view name, const json& params) {
  const Schema* schema = nullptr;
  for (const auto& s : schemas())
    if (s.name == name) schema = &s;
  if (!schema) {
    std::ostringstream msg;
    msg << "unknown problem '" << name << "'; expected one of:";
    for (const auto& n : catalog_names()) msg << " " << n;
    throw UsageError(msg.str());
  }
  if (!params.is_object()) schema_error(*schema, "params must be an object");
  for (const auto& key : schema->required)
    if (!params.contains(key)) schema_error(*schema, "missing parameter '" + key + "'");
  for (const auto& item : params.items()) {
    const auto& req = schema->required;
    if (std::find(req.begin(), req.end(), item.key()) == req.end())
      schema_error(*schema, "unknown parameter '" + item.key() + "'");
  }

  const Schema& s = *schema;
  if (name == "toy-quadratic")
    return toy_quadratic(parse_vector(s, params["a"], "a"), parse_vector(s, params["b"], "b"),
                         parse_matrix(s, params["C"], "C"));
  if (name == "lasso")
    return lasso(parse_matrix(s, params["C"], "C"), parse_vector(s, params["b"], "b"),
                 parse_number(s, params["lambda"], "lambda"));
  if (name == "tv-denoise-1d")
    return tv_denoise_1d(parse_vector(s, params["b"], "b"),
                         parse_number(s, params["lambda"], "lambda"));
  if (name == "matrix-game") return matrix_game(parse_matrix(s, params["payoff"], "payoff"));
  return skew_inclusion(parse_matrix(s, params["K"], "K"), parse_matrix(s, params["C"], "C"));
}

std::pair<Vector, Vector> reference_solution(const ProblemInstance& p) {
  if (!p.reference())
    throw UnsupportedCapability("problem '" + p.name() + "' has no reference solution");
  return {p.reference()->x, p.reference()->y};
}

}  // namespace pdhg::problems
