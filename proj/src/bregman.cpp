#include "pdhg/bregman.hpp"

#include "pdhg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace pdhg::bregman {

namespace {

using monotone::MonotoneMap;

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Bracket {
  double lo, g_lo, hi, g_hi;
};

// G(s) = ψ'(J(s)) + (s − J(s)) − c is continuous with slope ≥ min(m, 1).
// Returns the root s* of G; the solution is J(s*).
double solve_coordinate(const ScalarPotential& pot, const MonotoneMap& m, Eigen::Index i,
                        double c, double start, double tol) {
  auto G = [&](double s) {
    const double x = monotone::scalar_resolvent(m, i, 1.0, s);
    return pot.derivative(x) + (s - x) - c;
  };

  double s0 = start;
  double g0 = G(s0);
  if (g0 == 0.0) return s0;

  // Expand a bracket from the start point.
  double step = std::max(1.0, std::abs(s0));
  const double dir = g0 < 0.0 ? 1.0 : -1.0;
  double s1 = s0;
  double g1 = g0;
  int expansions = 0;
  while ((g1 < 0.0) == (g0 < 0.0) && g1 != 0.0) {
    s0 = s1;
    g0 = g1;
    s1 = s0 + dir * step;
    g1 = G(s1);
    step *= 2.0;
    if (++expansions > 2000 || !std::isfinite(g1))
      throw NotConverged("generalized resolvent not converged: no bracket found",
                         std::abs(g0));
  }
  if (g1 == 0.0) return s1;

  Bracket b = s0 < s1 ? Bracket{s0, g0, s1, g1} : Bracket{s1, g1, s0, g0};
  // Illinois regula falsi, falling back to bisection when the bracket stalls.
  int side = 0;
  double width = b.hi - b.lo;
  for (int it = 0; it < kSeparableIterationCap; ++it) {
    double s = b.lo - b.g_lo * (b.hi - b.lo) / (b.g_hi - b.g_lo);
    if (!(s > b.lo && s < b.hi)) s = 0.5 * (b.lo + b.hi);
    const double gs = G(s);
    if (std::abs(gs) <= tol || gs == 0.0) return s;
    if (gs < 0.0) {
      b.lo = s;
      b.g_lo = gs;
      if (side == -1) b.g_hi *= 0.5;
      side = -1;
    } else {
      b.hi = s;
      b.g_hi = gs;
      if (side == 1) b.g_lo *= 0.5;
      side = 1;
    }
    const double new_width = b.hi - b.lo;
    if (new_width > 0.5 * width) {
      // Force a bisection step to guarantee geometric shrinkage.
      const double mid = 0.5 * (b.lo + b.hi);
      const double gm = G(mid);
      if (std::abs(gm) <= tol || gm == 0.0) return mid;
      if (gm < 0.0) {
        b.lo = mid;
        b.g_lo = gm;
      } else {
        b.hi = mid;
        b.g_hi = gm;
      }
      side = 0;
    }
    width = b.hi - b.lo;
    if (width <= 4.0 * kEps * std::max({1.0, std::abs(b.lo), std::abs(b.hi)}))
      return std::abs(b.g_lo) < std::abs(b.g_hi) ? b.lo : b.hi;
  }
  throw NotConverged("generalized resolvent not converged",
                     std::min(std::abs(b.g_lo), std::abs(b.g_hi)));
}

}  // namespace

ScalarPotential quartic_potential(double quartic, double quadratic) {
  if (!(quartic >= 0.0) || !(quadratic > 0.0) || !std::isfinite(quartic) ||
      !std::isfinite(quadratic))
    throw UsageError("quartic_potential: need quartic >= 0 and quadratic > 0");
  std::ostringstream name;
  name << "quartic(" << quartic << "," << quadratic << ")";
  return ScalarPotential{
      name.str(),
      [=](double s) { return 0.25 * quartic * s * s * s * s + 0.5 * quadratic * s * s; },
      [=](double s) { return quartic * s * s * s + quadratic * s; },
      quadratic,
  };
}

std::string to_string(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::scalar_quadratic: return "scalar_quadratic";
    case GeometryKind::diagonal_quadratic: return "diagonal_quadratic";
    case GeometryKind::separable_smooth: return "separable_smooth";
  }
  return "unknown";
}

Geometry Geometry::scalar_quadratic(Eigen::Index dim, double tau) {
  if (dim < 1) throw UsageError("scalar_quadratic: dim must be >= 1");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw UsageError("scalar_quadratic: tau must be positive and finite");
  Geometry g(GeometryKind::scalar_quadratic, dim);
  g.tau_ = tau;
  return g;
}

Geometry Geometry::diagonal_quadratic(Vector weights) {
  if (weights.size() < 1) throw UsageError("diagonal_quadratic: empty weights");
  if (!weights.allFinite() || (weights.array() <= 0.0).any())
    throw UsageError("diagonal_quadratic: weights must be strictly positive and finite");
  Geometry g(GeometryKind::diagonal_quadratic, weights.size());
  g.weights_ = std::move(weights);
  return g;
}

Geometry Geometry::separable_smooth(std::vector<ScalarPotential> potentials) {
  if (potentials.empty()) throw UsageError("separable_smooth: no potentials");
  for (const auto& p : potentials) {
    if (!p.value || !p.derivative || !(p.modulus > 0.0) || !std::isfinite(p.modulus))
      throw UsageError("separable_smooth: each potential needs value, derivative and modulus > 0");
  }
  Geometry g(GeometryKind::separable_smooth, static_cast<Eigen::Index>(potentials.size()));
  g.potentials_ = std::make_shared<const std::vector<ScalarPotential>>(std::move(potentials));
  return g;
}

double Geometry::step() const {
  if (kind_ != GeometryKind::scalar_quadratic)
    throw UsageError("Geometry::step: only scalar_quadratic geometries have a step");
  return tau_;
}

Vector Geometry::weights() const {
  switch (kind_) {
    case GeometryKind::scalar_quadratic: return Vector::Constant(dim_, 1.0 / tau_);
    case GeometryKind::diagonal_quadratic: return weights_;
    case GeometryKind::separable_smooth: break;
  }
  throw UsageError("Geometry::weights: separable_smooth geometries have no weights");
}

const std::vector<ScalarPotential>& Geometry::potentials() const {
  if (kind_ != GeometryKind::separable_smooth)
    throw UsageError("Geometry::potentials: not a separable_smooth geometry");
  return *potentials_;
}

double Geometry::modulus() const {
  switch (kind_) {
    case GeometryKind::scalar_quadratic: return 1.0 / (2.0 * tau_);
    case GeometryKind::diagonal_quadratic: return 0.5 * weights_.minCoeff();
    case GeometryKind::separable_smooth: {
      double m = std::numeric_limits<double>::infinity();
      for (const auto& p : *potentials_) m = std::min(m, p.modulus);
      return 0.5 * m;
    }
  }
  return 0.0;
}

double Geometry::psi(const Vector& x) const {
  hilbert::require_dim(x, dim_, "psi");
  switch (kind_) {
    case GeometryKind::scalar_quadratic: return x.squaredNorm() / (2.0 * tau_);
    case GeometryKind::diagonal_quadratic: return 0.5 * x.dot(weights_.cwiseProduct(x));
    case GeometryKind::separable_smooth: {
      double total = 0.0;
      for (Eigen::Index i = 0; i < dim_; ++i) total += (*potentials_)[i].value(x[i]);
      return total;
    }
  }
  return 0.0;
}

Vector Geometry::grad_psi(const Vector& x) const {
  hilbert::require_dim(x, dim_, "grad_psi");
  switch (kind_) {
    case GeometryKind::scalar_quadratic: return x / tau_;
    case GeometryKind::diagonal_quadratic: return weights_.cwiseProduct(x);
    case GeometryKind::separable_smooth: {
      Vector g(dim_);
      for (Eigen::Index i = 0; i < dim_; ++i) g[i] = (*potentials_)[i].derivative(x[i]);
      return g;
    }
  }
  return {};
}

double Geometry::divergence(const Vector& x, const Vector& xbar) const {
  hilbert::require_dim(x, dim_, "divergence x");
  hilbert::require_dim(xbar, dim_, "divergence xbar");
  switch (kind_) {
    case GeometryKind::scalar_quadratic: return (x - xbar).squaredNorm() / (2.0 * tau_);
    case GeometryKind::diagonal_quadratic: {
      const Vector d = x - xbar;
      return 0.5 * d.dot(weights_.cwiseProduct(d));
    }
    case GeometryKind::separable_smooth: {
      double total = 0.0;
      for (Eigen::Index i = 0; i < dim_; ++i) {
        const auto& p = (*potentials_)[i];
        // Per-coordinate terms are each nonnegative by convexity.
        total += std::max(0.0, p.value(x[i]) - p.value(xbar[i]) -
                                   p.derivative(xbar[i]) * (x[i] - xbar[i]));
      }
      return total;
    }
  }
  return 0.0;
}

std::string Geometry::describe() const {
  std::ostringstream s;
  s << to_string(kind_) << "[" << dim_ << "]";
  if (kind_ == GeometryKind::scalar_quadratic) s << "(tau=" << tau_ << ")";
  return s.str();
}

double generalized_resolvent_residual(const Geometry& g, const MonotoneMap& m,
                                      const Vector& xbar, const Vector& z, const Vector& xhat) {
  const Vector arg = xhat + z + g.grad_psi(xbar) - g.grad_psi(xhat);
  return (xhat - monotone::resolvent(m, 1.0, arg)).lpNorm<Eigen::Infinity>();
}

Vector generalized_resolvent(const Geometry& g, const MonotoneMap& m, const Vector& xbar,
                             const Vector& z, double tol) {
  if (!(tol > 0.0)) throw UsageError("generalized_resolvent: tol must be > 0");
  if (g.dim() != m.dim()) throw UsageError("generalized_resolvent: geometry/operator dims differ");
  hilbert::require_dim(xbar, g.dim(), "generalized_resolvent xbar");
  hilbert::require_dim(z, g.dim(), "generalized_resolvent z");

  Vector xhat;
  switch (g.kind()) {
    case GeometryKind::scalar_quadratic: {
      const double tau = g.step();
      xhat = monotone::resolvent(m, tau, xbar + tau * z);
      break;
    }
    case GeometryKind::diagonal_quadratic: {
      const Vector& w = g.weights();
      xhat = monotone::diagonal_resolvent(m, w, xbar + z.cwiseQuotient(w));
      break;
    }
    case GeometryKind::separable_smooth: {
      if (!m.is_separable())
        throw UnsupportedCapability("generalized_resolvent: separable geometry needs a separable "
                                    "operator, got " + m.describe());
      const auto& pots = g.potentials();
      xhat.resize(g.dim());
      for (Eigen::Index i = 0; i < g.dim(); ++i) {
        const double c = z[i] + pots[i].derivative(xbar[i]);
        const double s = solve_coordinate(pots[i], m, i, c, xbar[i], tol);
        xhat[i] = monotone::scalar_resolvent(m, i, 1.0, s);
      }
      break;
    }
  }

  const double residual = generalized_resolvent_residual(g, m, xbar, z, xhat);
  const Vector gbar = g.grad_psi(xbar);
  const double scale = 1.0 + xhat.lpNorm<Eigen::Infinity>() + z.lpNorm<Eigen::Infinity>() +
                       gbar.lpNorm<Eigen::Infinity>();
  if (!xhat.allFinite() || !(residual <= tol * scale)) {
    std::ostringstream msg;
    msg << "generalized resolvent not converged (residual " << residual << ")";
    throw NotConverged(msg.str(), residual);
  }
  return xhat;
}

AlphaCertificate certify_alpha(const Geometry& g1, const Geometry& g2, double norm_C) {
  if (!(norm_C >= 1e-14) || !std::isfinite(norm_C))
    throw UsageError("certify_alpha: norm of C must be positive (C must be non-zero)");
  AlphaCertificate cert;
  cert.norm_C = norm_C;
  cert.geom1_modulus = g1.modulus();
  cert.geom2_modulus = g2.modulus();
  const double a = cert.geom1_modulus;
  const double b = cert.geom2_modulus;
  const double off = 0.5 * norm_C;
  // λ_min = det / λ_max avoids cancellation near the boundary.
  const double lambda_max = 0.5 * (a + b) + std::hypot(0.5 * (a - b), off);
  cert.alpha = (a * b - off * off) / lambda_max;
  cert.valid = cert.alpha > 1e-12 * std::max(a, b);
  return cert;
}

JointConditionReport check_joint_condition(const Geometry& g1, const Geometry& g2,
                                           const hilbert::LinearMap& C, double alpha,
                                           int samples, std::uint64_t seed) {
  if (samples < 1) throw UsageError("check_joint_condition: samples must be >= 1");
  if (C.input_dim() != g1.dim() || C.output_dim() != g2.dim())
    throw UsageError("check_joint_condition: dimensions of C do not match the geometries");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> log_scale(-1.0, 1.0);
  auto draw = [&](Eigen::Index n, double scale) {
    Vector v(n);
    for (auto& c : v) c = scale * normal(rng);
    return v;
  };

  JointConditionReport report;
  report.samples = samples;
  report.min_value = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const double scale = std::pow(10.0, log_scale(rng));
    const Vector x = draw(g1.dim(), scale), xbar = draw(g1.dim(), scale);
    const Vector y = draw(g2.dim(), scale), ybar = draw(g2.dim(), scale);
    const Vector dx = x - xbar, dy = y - ybar;
    const double value = g1.divergence(x, xbar) + g2.divergence(y, ybar) -
                         C.apply(dx).dot(dy) - alpha * (dx.squaredNorm() + dy.squaredNorm());
    report.min_value = std::min(report.min_value, value);
    if (value < -1e-10) ++report.violations;
  }
  return report;
}

}  // namespace pdhg::bregman
