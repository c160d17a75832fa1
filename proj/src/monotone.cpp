#include "pdhg/monotone.hpp"

#include "pdhg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace pdhg::monotone {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    std::ostringstream msg;
    msg << what << ": step must be positive and finite, got " << t;
    throw UsageError(msg.str());
  }
}

void require_weights(const Vector& w, Eigen::Index dim) {
  hilbert::require_dim(w, dim, "diagonal_resolvent weights");
  if (!w.allFinite() || (w.array() <= 0.0).any())
    throw UsageError("diagonal_resolvent: weights must be strictly positive and finite");
}

Vector solve_checked(const Matrix& lhs, const Vector& rhs, const char* what) {
  Eigen::PartialPivLU<Matrix> lu(lhs);
  Vector x = lu.solve(rhs);
  const double scale = 1.0 + lhs.cwiseAbs().maxCoeff() * x.cwiseAbs().maxCoeff() +
                       rhs.cwiseAbs().maxCoeff();
  if (!x.allFinite() || (lhs * x - rhs).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    std::ostringstream msg;
    msg << what << ": linear solve failed; operator is not monotone";
    throw InternalConsistencyError(msg.str());
  }
  return x;
}

double clamp(double s, double lo, double hi) { return std::min(std::max(s, lo), hi); }

double soft(double s, double threshold) {
  const double mag = std::abs(s) - threshold;
  return mag > 0.0 ? std::copysign(mag, s) : 0.0;
}

void reject_zero_inverse(const MonotoneMap& m, const char* what) {
  if (m.kind() == Kind::zero) {
    std::ostringstream msg;
    msg << what << ": the zero map has no single-valued inverse resolvent";
    throw UsageError(msg.str());
  }
}

bool in_box(const Vector& x, const Vector& lo, const Vector& hi) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] < lo[i] - kMembershipTol || x[i] > hi[i] + kMembershipTol) return false;
  return true;
}

bool in_simplex(const Vector& x) {
  return (x.array() >= -kMembershipTol).all() && std::abs(x.sum() - 1.0) <= kMembershipTol;
}

}  // namespace

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::zero: return "zero";
    case Kind::linear: return "linear";
    case Kind::l1_scaled: return "l1_scaled";
    case Kind::quadratic_shift: return "quadratic_shift";
    case Kind::box_normal_cone: return "box_normal_cone";
    case Kind::simplex_normal_cone: return "simplex_normal_cone";
    case Kind::inverse_of: return "inverse_of";
  }
  return "unknown";
}

MonotoneMap MonotoneMap::zero(Eigen::Index dim) {
  if (dim < 1) throw UsageError("MonotoneMap::zero: dim must be >= 1");
  return MonotoneMap(Zero{}, dim);
}

MonotoneMap MonotoneMap::linear(Matrix S, Matrix K) {
  const auto n = S.rows();
  if (n < 1 || S.cols() != n || K.rows() != n || K.cols() != n)
    throw UsageError("MonotoneMap::linear: S and K must be square of equal size");
  if (!S.allFinite() || !K.allFinite())
    throw UsageError("MonotoneMap::linear: non-finite entry");
  const double s_scale = 1.0 + S.cwiseAbs().maxCoeff();
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * s_scale)
    throw UsageError("MonotoneMap::linear: S is not symmetric");
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * s_scale)
    throw UsageError("MonotoneMap::linear: S is not positive semidefinite");
  if ((K + K.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + K.cwiseAbs().maxCoeff()))
    throw UsageError("MonotoneMap::linear: K is not skew-symmetric");
  return MonotoneMap(Linear{std::move(S), std::move(K)}, n);
}

MonotoneMap MonotoneMap::l1_scaled(Eigen::Index dim, double lambda) {
  if (dim < 1) throw UsageError("MonotoneMap::l1_scaled: dim must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw UsageError("MonotoneMap::l1_scaled: lambda must be finite and >= 0");
  return MonotoneMap(L1{lambda}, dim);
}

MonotoneMap MonotoneMap::quadratic_shift(Vector b) {
  if (b.size() < 1) throw UsageError("MonotoneMap::quadratic_shift: empty shift");
  if (!b.allFinite()) throw UsageError("MonotoneMap::quadratic_shift: non-finite shift");
  const auto n = b.size();
  return MonotoneMap(QuadShift{std::move(b)}, n);
}

MonotoneMap MonotoneMap::box_normal_cone(Vector lower, Vector upper) {
  const auto n = lower.size();
  if (n < 1 || upper.size() != n)
    throw UsageError("MonotoneMap::box_normal_cone: bounds must be nonempty and of equal size");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] == kInf ||
        upper[i] == -kInf || lower[i] > upper[i])
      throw UsageError("MonotoneMap::box_normal_cone: need lower <= upper with a nonempty box");
  }
  return MonotoneMap(Box{std::move(lower), std::move(upper)}, n);
}

MonotoneMap MonotoneMap::simplex_normal_cone(Eigen::Index dim) {
  if (dim < 1) throw UsageError("MonotoneMap::simplex_normal_cone: dim must be >= 1");
  return MonotoneMap(Simplex{}, dim);
}

MonotoneMap MonotoneMap::inverse_of(const MonotoneMap& inner) {
  return MonotoneMap(Inverse{std::make_shared<const MonotoneMap>(inner)}, inner.dim());
}

Kind MonotoneMap::kind() const noexcept { return static_cast<Kind>(payload_->index()); }

bool MonotoneMap::has_diagonal_resolvent() const {
  switch (kind()) {
    case Kind::simplex_normal_cone: return false;
    case Kind::inverse_of:
      return inner().kind() != Kind::zero && inner().has_diagonal_resolvent();
    default: return true;
  }
}

bool MonotoneMap::has_function_value() const {
  switch (kind()) {
    case Kind::linear: return false;
    case Kind::inverse_of: return inner().has_function_value();
    default: return true;
  }
}

bool MonotoneMap::is_separable() const {
  switch (kind()) {
    case Kind::linear:
    case Kind::simplex_normal_cone: return false;
    case Kind::inverse_of: return inner().kind() != Kind::zero && inner().is_separable();
    default: return true;
  }
}

const Matrix& MonotoneMap::sym_part() const { return std::get<Linear>(*payload_).S; }
const Matrix& MonotoneMap::skew_part() const { return std::get<Linear>(*payload_).K; }
double MonotoneMap::lambda() const { return std::get<L1>(*payload_).lambda; }
const Vector& MonotoneMap::shift() const { return std::get<QuadShift>(*payload_).b; }
const Vector& MonotoneMap::lower() const { return std::get<Box>(*payload_).lower; }
const Vector& MonotoneMap::upper() const { return std::get<Box>(*payload_).upper; }
const MonotoneMap& MonotoneMap::inner() const { return *std::get<Inverse>(*payload_).inner; }

std::string MonotoneMap::describe() const {
  std::ostringstream s;
  switch (kind()) {
    case Kind::l1_scaled: s << "l1_scaled(" << lambda() << ")"; break;
    case Kind::inverse_of: s << "inverse_of(" << inner().describe() << ")"; break;
    default: s << to_string(kind());
  }
  s << "[" << dim_ << "]";
  return s.str();
}

Vector soft_threshold(const Vector& z, double threshold) {
  return z.unaryExpr([threshold](double s) { return soft(s, threshold); });
}

Vector project_simplex(const Vector& z) {
  const auto n = z.size();
  if (n < 1) throw UsageError("project_simplex: dimension must be >= 1");
  if (!z.allFinite()) throw UsageError("project_simplex: non-finite input");
  std::vector<double> sorted(z.data(), z.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  // Largest k with sorted[k-1] - (Σ_{j<k} sorted[j] - 1)/k > 0.
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index k = 1; k <= n; ++k) {
    cumulative += sorted[k - 1];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k);
    if (sorted[k - 1] - candidate > 0.0) theta = candidate;
  }
  return (z.array() - theta).max(0.0).matrix();
}

double scalar_resolvent(const MonotoneMap& m, Eigen::Index i, double t, double s) {
  require_positive(t, "scalar_resolvent");
  if (i < 0 || i >= m.dim()) throw UsageError("scalar_resolvent: coordinate out of range");
  switch (m.kind()) {
    case Kind::zero: return s;
    case Kind::l1_scaled: return soft(s, t * m.lambda());
    case Kind::quadratic_shift: return (s + t * m.shift()[i]) / (1.0 + t);
    case Kind::box_normal_cone: return clamp(s, m.lower()[i], m.upper()[i]);
    case Kind::inverse_of: {
      reject_zero_inverse(m.inner(), "scalar_resolvent");
      return s - t * scalar_resolvent(m.inner(), i, 1.0 / t, s / t);
    }
    case Kind::linear:
    case Kind::simplex_normal_cone: break;
  }
  throw UnsupportedCapability("scalar_resolvent: operator " + m.describe() +
                              " is not separable");
}

Vector resolvent(const MonotoneMap& m, double t, const Vector& z) {
  require_positive(t, "resolvent");
  hilbert::require_dim(z, m.dim(), "resolvent");
  switch (m.kind()) {
    case Kind::zero: return z;
    case Kind::linear: {
      const auto n = m.dim();
      const Matrix lhs = Matrix::Identity(n, n) + t * m.sym_part() + t * m.skew_part();
      return solve_checked(lhs, z, "resolvent");
    }
    case Kind::l1_scaled: return soft_threshold(z, t * m.lambda());
    case Kind::quadratic_shift: return (z + t * m.shift()) / (1.0 + t);
    case Kind::box_normal_cone: return z.cwiseMax(m.lower()).cwiseMin(m.upper());
    case Kind::simplex_normal_cone: return project_simplex(z);
    case Kind::inverse_of: break;
  }

  // Direct closed forms for inverses; generic cases fall back to Moreau.
  const MonotoneMap& in = m.inner();
  switch (in.kind()) {
    case Kind::zero: reject_zero_inverse(in, "resolvent"); break;
    case Kind::linear: {
      // x = z − t·w with (M + tI)w = z.
      const auto n = in.dim();
      const Matrix lhs = in.sym_part() + in.skew_part() + t * Matrix::Identity(n, n);
      return z - t * solve_checked(lhs, z, "resolvent");
    }
    case Kind::l1_scaled: return z.cwiseMax(-in.lambda()).cwiseMin(in.lambda());
    case Kind::quadratic_shift: return (z - t * in.shift()) / (1.0 + t);
    case Kind::inverse_of: return resolvent(in.inner(), t, z);
    case Kind::box_normal_cone:
    case Kind::simplex_normal_cone: break;
  }
  return inverse_resolvent(in, t, z);
}

Vector inverse_resolvent(const MonotoneMap& m, double s, const Vector& z) {
  require_positive(s, "inverse_resolvent");
  hilbert::require_dim(z, m.dim(), "inverse_resolvent");
  reject_zero_inverse(m, "inverse_resolvent");
  return z - s * resolvent(m, 1.0 / s, z / s);
}

Vector diagonal_resolvent(const MonotoneMap& m, const Vector& w, const Vector& z) {
  require_weights(w, m.dim());
  hilbert::require_dim(z, m.dim(), "diagonal_resolvent");
  if (!m.has_diagonal_resolvent()) {
    // Equal weights reduce to the plain resolvent with t = 1/w.
    if ((w.array() == w[0]).all()) return resolvent(m, 1.0 / w[0], z);
    throw UnsupportedCapability("diagonal_resolvent: unsupported for " + m.describe());
  }

  if (m.kind() == Kind::linear) {
    Matrix lhs = m.sym_part() + m.skew_part();
    lhs.diagonal() += w;
    return solve_checked(lhs, w.cwiseProduct(z), "diagonal_resolvent");
  }
  if (m.kind() == Kind::inverse_of && m.inner().kind() == Kind::linear) {
    // u solves (W⁻¹ + S + K)u = z, then x = z − W⁻¹u.
    const MonotoneMap& in = m.inner();
    const Vector winv = w.cwiseInverse();
    Matrix lhs = in.sym_part() + in.skew_part();
    lhs.diagonal() += winv;
    return z - winv.cwiseProduct(solve_checked(lhs, z, "diagonal_resolvent"));
  }
  if (m.kind() == Kind::inverse_of && !m.inner().is_separable()) {
    // Weighted Moreau: x = z − W⁻¹ u with W⁻¹u + inner(u) ∋ z.
    const Vector winv = w.cwiseInverse();
    return z - winv.cwiseProduct(diagonal_resolvent(m.inner(), winv, w.cwiseProduct(z)));
  }

  Vector out(m.dim());
  for (Eigen::Index i = 0; i < m.dim(); ++i) out[i] = scalar_resolvent(m, i, 1.0 / w[i], z[i]);
  return out;
}

double function_value(const MonotoneMap& m, const Vector& x) {
  hilbert::require_dim(x, m.dim(), "function_value");
  switch (m.kind()) {
    case Kind::zero: return 0.0;
    case Kind::l1_scaled: return m.lambda() * x.lpNorm<1>();
    case Kind::quadratic_shift: return 0.5 * (x - m.shift()).squaredNorm();
    case Kind::box_normal_cone: return in_box(x, m.lower(), m.upper()) ? 0.0 : kInf;
    case Kind::simplex_normal_cone: return in_simplex(x) ? 0.0 : kInf;
    case Kind::inverse_of: return conjugate_value(m.inner(), x);
    case Kind::linear: break;
  }
  throw UnsupportedCapability("function_value: " + m.describe() +
                              " is not a subdifferential");
}

double conjugate_value(const MonotoneMap& m, const Vector& w) {
  hilbert::require_dim(w, m.dim(), "conjugate_value");
  switch (m.kind()) {
    case Kind::zero: return w.lpNorm<Eigen::Infinity>() <= kMembershipTol ? 0.0 : kInf;
    case Kind::l1_scaled:
      return w.lpNorm<Eigen::Infinity>() <= m.lambda() + kMembershipTol ? 0.0 : kInf;
    case Kind::quadratic_shift: return 0.5 * w.squaredNorm() + w.dot(m.shift());
    case Kind::box_normal_cone: {
      // Support function of the box.
      double total = 0.0;
      for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (std::abs(w[i]) <= kMembershipTol &&
            (std::isinf(m.lower()[i]) || std::isinf(m.upper()[i])))
          continue;
        const double bound = w[i] > 0.0 ? m.upper()[i] : m.lower()[i];
        if (w[i] != 0.0) total += w[i] * bound;
      }
      return total;
    }
    case Kind::simplex_normal_cone: return w.maxCoeff();
    case Kind::inverse_of: return function_value(m.inner(), w);
    case Kind::linear: break;
  }
  throw UnsupportedCapability("conjugate_value: " + m.describe() +
                              " is not a subdifferential");
}

GraphPoint graph_point(const MonotoneMap& m, double t, const Vector& z) {
  Vector x = resolvent(m, t, z);
  Vector image = (z - x) / t;
  return {std::move(x), std::move(image)};
}

double graph_residual(const MonotoneMap& m, const GraphPoint& p) {
  hilbert::require_dim(p.point, m.dim(), "graph_residual point");
  hilbert::require_dim(p.image, m.dim(), "graph_residual image");
  return (p.point - resolvent(m, 1.0, p.point + p.image)).norm();
}

}  // namespace pdhg::monotone
