#include "pdhg/hilbert.hpp"

#include "pdhg/errors.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace pdhg::hilbert {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

double inner(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    std::ostringstream msg;
    msg << "inner: dimension mismatch (" << a.size() << " vs " << b.size() << ")";
    throw UsageError(msg.str());
  }
  return a.dot(b);
}

bool all_finite(const Vector& v) { return v.allFinite(); }

void require_dim(const Vector& v, Eigen::Index dim, const std::string& what) {
  if (v.size() != dim) {
    std::ostringstream msg;
    msg << what << ": expected dimension " << dim << ", got " << v.size();
    throw UsageError(msg.str());
  }
}

LinearMap LinearMap::dense(Matrix m) {
  if (m.size() == 0) throw UsageError("LinearMap::dense: empty matrix");
  if (!m.allFinite()) throw UsageError("LinearMap::dense: non-finite entry");
  const auto rows = m.rows();
  const auto cols = m.cols();
  return LinearMap(Dense{std::move(m)}, cols, rows);
}

LinearMap LinearMap::diagonal(Vector d) {
  if (d.size() == 0) throw UsageError("LinearMap::diagonal: empty diagonal");
  if (!d.allFinite()) throw UsageError("LinearMap::diagonal: non-finite entry");
  const auto n = d.size();
  return LinearMap(Diagonal{std::move(d)}, n, n);
}

LinearMap LinearMap::identity(Eigen::Index n) { return diagonal(Vector::Ones(n)); }

LinearMap LinearMap::forward_difference(Eigen::Index n) {
  if (n < 1) throw UsageError("LinearMap::forward_difference: n must be >= 1");
  return LinearMap(ForwardDifference{}, n, n);
}

LinearMap LinearMap::compose(const LinearMap& outer, const LinearMap& inner) {
  if (outer.input_dim() != inner.output_dim()) {
    std::ostringstream msg;
    msg << "LinearMap::compose: inner output dimension " << inner.output_dim()
        << " does not match outer input dimension " << outer.input_dim();
    throw UsageError(msg.str());
  }
  return LinearMap(Compose{std::make_shared<const LinearMap>(outer),
                           std::make_shared<const LinearMap>(inner)},
                   inner.input_dim(), outer.output_dim());
}

LinearMap LinearMap::scaled(double factor, const LinearMap& map) {
  if (!std::isfinite(factor)) throw UsageError("LinearMap::scaled: non-finite factor");
  return LinearMap(Scaled{factor, std::make_shared<const LinearMap>(map)}, map.input_dim(),
                   map.output_dim());
}

Vector LinearMap::apply(const Vector& x) const {
  require_dim(x, in_, "LinearMap::apply");
  return forward_unchecked(x);
}

Vector LinearMap::adjoint_apply(const Vector& y) const {
  require_dim(y, out_, "LinearMap::adjoint_apply");
  return adjoint_unchecked(y);
}

Vector LinearMap::forward_unchecked(const Vector& x) const {
  return std::visit(
      Overloaded{
          [&](const Dense& d) -> Vector { return d.m * x; },
          [&](const Diagonal& d) -> Vector { return d.d.cwiseProduct(x); },
          [&](const ForwardDifference&) -> Vector {
            const auto n = x.size();
            Vector out(n);
            for (Eigen::Index i = 0; i + 1 < n; ++i) out[i] = x[i + 1] - x[i];
            out[n - 1] = -x[n - 1];
            return out;
          },
          [&](const Compose& c) -> Vector {
            return c.outer->forward_unchecked(c.inner->forward_unchecked(x));
          },
          [&](const Scaled& s) -> Vector { return s.factor * s.map->forward_unchecked(x); },
      },
      *node_);
}

Vector LinearMap::adjoint_unchecked(const Vector& y) const {
  return std::visit(
      Overloaded{
          [&](const Dense& d) -> Vector { return d.m.transpose() * y; },
          [&](const Diagonal& d) -> Vector { return d.d.cwiseProduct(y); },
          [&](const ForwardDifference&) -> Vector {
            // (D*y)_i = y_{i-1} - y_i with y_{-1} = 0.
            const auto n = y.size();
            Vector out(n);
            out[0] = -y[0];
            for (Eigen::Index i = 1; i < n; ++i) out[i] = y[i - 1] - y[i];
            return out;
          },
          [&](const Compose& c) -> Vector {
            return c.inner->adjoint_unchecked(c.outer->adjoint_unchecked(y));
          },
          [&](const Scaled& s) -> Vector { return s.factor * s.map->adjoint_unchecked(y); },
      },
      *node_);
}

Matrix LinearMap::to_dense() const {
  Matrix out(out_, in_);
  for (Eigen::Index j = 0; j < in_; ++j) out.col(j) = forward_unchecked(Vector::Unit(in_, j));
  return out;
}

std::string LinearMap::describe() const {
  std::ostringstream s;
  std::visit(Overloaded{
                 [&](const Dense&) { s << "dense"; },
                 [&](const Diagonal&) { s << "diagonal"; },
                 [&](const ForwardDifference&) { s << "forward-difference"; },
                 [&](const Compose& c) {
                   s << "(" << c.outer->describe() << " o " << c.inner->describe() << ")";
                 },
                 [&](const Scaled& sc) { s << sc.factor << "*" << sc.map->describe(); },
             },
             *node_);
  s << " " << out_ << "x" << in_;
  return s.str();
}

double operator_norm_estimate(const LinearMap& map, double tol, int max_iter,
                              std::uint64_t seed) {
  if (!(tol > 0.0)) throw UsageError("operator_norm_estimate: tol must be > 0");
  if (max_iter < 1) throw UsageError("operator_norm_estimate: max_iter must be >= 1");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(map.input_dim());
  for (auto& c : v) c = normal(rng);
  v.normalize();

  double mu = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Vector w = map.adjoint_apply(map.apply(v));
    mu = v.dot(w);
    const double residual = (w - mu * v).norm();
    if (residual <= tol * (1.0 + mu)) return std::sqrt(std::max(mu, 0.0));
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
  }
  throw NotConverged("norm estimate not converged", std::sqrt(std::max(mu, 0.0)));
}

}  // namespace pdhg::hilbert
