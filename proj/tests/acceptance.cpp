// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "pdhg/diagnostics.hpp"
#include "pdhg/errors.hpp"
#include "pdhg/solver.hpp"
#include "support.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace pdhg;
using bregman::Geometry;
using monotone::MonotoneMap;
using testing::Rng;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

struct Case {
  problems::ProblemInstance problem;
  solver::SolverConfig config;
  Vector x0;
  Vector y0;
};

solver::SolverConfig scalar_config(const problems::ProblemInstance& p, double factor) {
  const double L = solver::estimate_norm(p.C(), 0);
  return {.geometry1 = Geometry::scalar_quadratic(p.primal_dim(), factor / L),
          .geometry2 = Geometry::scalar_quadratic(p.dual_dim(), factor / L)};
}

Vector ones_like(Eigen::Index n, double scale) { return Vector::Constant(n, scale); }

std::vector<Case> certified_cases() {
  std::vector<Case> out;
  for (const auto& p : {testing::toy_quadratic_instance(), testing::lasso_instance(),
                        testing::tv_instance(0.2), testing::skew_instance()}) {
    out.push_back({p, scalar_config(p, 0.9), ones_like(p.primal_dim(), 1.0),
                   ones_like(p.dual_dim(), -0.5)});
  }
  const auto rps = testing::rps_instance();
  out.push_back({rps, scalar_config(rps, 0.9), Vector{{1.0, 0.0, 0.0}}, Vector{{0.0, 1.0, 0.0}}});

  // Non-Euclidean geometries on the separable lasso operators.
  const auto lasso = testing::lasso_instance();
  const double L = solver::estimate_norm(lasso.C(), 0);
  const auto quartic = bregman::quartic_potential(0.5, 1.2 * L);
  out.push_back({lasso,
                 {.geometry1 = Geometry::separable_smooth(std::vector(5, quartic)),
                  .geometry2 = Geometry::separable_smooth(std::vector(8, quartic))},
                 ones_like(5, 1.0), ones_like(8, -0.5)});
  Vector w1(5), w2(8);
  for (Eigen::Index i = 0; i < 5; ++i) w1[i] = 1.1 * L * (1.0 + 0.3 * static_cast<double>(i));
  for (Eigen::Index i = 0; i < 8; ++i) w2[i] = 1.1 * L * (1.0 + 0.1 * static_cast<double>(i));
  out.push_back({lasso,
                 {.geometry1 = Geometry::diagonal_quadratic(w1),
                  .geometry2 = Geometry::diagonal_quadratic(w2)},
                 ones_like(5, 1.0), ones_like(8, -0.5)});
  return out;
}

std::string label(const Case& c) {
  return c.problem.name() + "/" + bregman::to_string(c.config.geometry1.kind());
}

Outcome quadratic_equivalence() {
  Outcome o;
  double worst = 0.0;
  for (const auto& p : {testing::toy_quadratic_instance(), testing::lasso_instance(),
                        testing::tv_instance(0.2), testing::rps_instance(),
                        testing::skew_instance()}) {
    const auto cfg = scalar_config(p, 0.9);
    Rng rng(101);
    auto a = SolverState::initial(testing::random_vector(rng, p.primal_dim()),
                                  testing::random_vector(rng, p.dual_dim()));
    auto b = a;
    double dev = 0.0;
    for (int k = 0; k < 1000; ++k) {
      a = solver::step(a, p, cfg);
      b = solver::reference_step(b, p, cfg.geometry1.step(), cfg.geometry2.step());
      dev = std::max({dev, (a.x - b.x).lpNorm<Eigen::Infinity>(),
                      (a.y - b.y).lpNorm<Eigen::Infinity>()});
    }
    o.require(dev <= 1e-10, p.name() + " deviates by " + std::to_string(dev));
    worst = std::max(worst, dev);
  }
  std::ostringstream d;
  d << "max deviation " << worst << " over 5 entries x 1000 steps";
  if (o.pass) o.detail = d.str();
  return o;
}

// Criteria 2 and 4 share the same trajectories.
Outcome lyapunov_and_boundedness(bool boundedness) {
  Outcome o;
  long checked = 0;
  for (const auto& c : certified_cases()) {
    const auto& p = c.problem;
    const auto& g1 = c.config.geometry1;
    const auto& g2 = c.config.geometry2;
    const auto cert = solver::certify(p, c.config);
    o.require(cert.valid, label(c) + " not certified");
    const auto [xs, ys] = problems::reference_solution(p);
    const double delta0 = diagnostics::lyapunov(p, xs, ys, c.x0, c.y0, g1, g2);
    double prev = delta0;
    auto s = SolverState::initial(c.x0, c.y0);
    for (long n = 1; n <= 10000; ++n) {
      s = solver::step(s, p, c.config);
      if (boundedness) {
        const auto [X, Y] = solver::ergodic_average(s);
        const double lhs = (X - xs).squaredNorm() + (Y - ys).squaredNorm();
        o.require(lhs <= delta0 / cert.alpha + 1e-8,
                  label(c) + " ergodic bound fails at N=" + std::to_string(n));
      } else {
        const double d = diagnostics::lyapunov(p, xs, ys, s.x, s.y, g1, g2);
        o.require(d <= prev + 1e-10 * (1.0 + delta0),
                  label(c) + " Lyapunov increases at n=" + std::to_string(n));
        prev = d;
      }
      ++checked;
    }
  }
  if (o.pass)
    o.detail = std::to_string(checked) + " iterations over " +
               std::to_string(certified_cases().size()) + " certified runs";
  return o;
}

Outcome ergodic_sandwich() {
  Outcome o;
  double min_lhs = 0.0, max_ratio = 0.0;
  for (const auto& p :
       {testing::toy_quadratic_instance(), testing::lasso_instance(), testing::rps_instance()}) {
    const auto cfg = scalar_config(p, 0.9);
    const auto w = *diagnostics::solution_witness(p);
    const Vector x0 = p.name() == "matrix-game" ? Vector{{1.0, 0.0, 0.0}} : ones_like(p.primal_dim(), 1.0);
    const Vector y0 = p.name() == "matrix-game" ? Vector{{0.0, 1.0, 0.0}} : ones_like(p.dual_dim(), -0.5);
    auto s = SolverState::initial(x0, y0);
    for (long n = 1; n <= 10000; ++n) {
      s = solver::step(s, p, cfg);
      if (n != 10 && n != 100 && n != 1000 && n != 10000) continue;
      const auto [X, Y] = solver::ergodic_average(s);
      const auto cert = diagnostics::ergodic_gap_certificate(p, w, cfg.geometry1, cfg.geometry2,
                                                             x0, y0, X, Y, n);
      // The solution witness cancels algebraically; only rounding remains on the left.
      o.require(cert.lhs >= -1e-12 && cert.lhs <= cert.rhs,
                p.name() + " sandwich fails at N=" + std::to_string(n));
      min_lhs = std::min(min_lhs, cert.lhs);
      max_ratio = std::max(max_ratio, cert.lhs / cert.rhs);
    }
  }
  std::ostringstream d;
  d << "min lhs " << min_lhs << ", max lhs/rhs " << max_ratio;
  if (o.pass) o.detail = d.str();
  return o;
}

Outcome convergence_to_oracle() {
  Outcome o;
  std::ostringstream d;
  auto final_distance = [&](const problems::ProblemInstance& p, const Vector& xs,
                            const Vector& ys) {
    auto cfg = scalar_config(p, 0.9);
    cfg.max_iter = 50000;
    const auto trace =
        solver::run(p, cfg, ones_like(p.primal_dim(), 1.0), ones_like(p.dual_dim(), -0.5));
    const double dist = std::sqrt((trace.final_state.x - xs).squaredNorm() +
                                  (trace.final_state.y - ys).squaredNorm());
    o.require(dist <= 1e-6, p.name() + " ends at distance " + std::to_string(dist));
    d << p.name() << " " << dist << " (" << trace.final_state.n << " it); ";
  };

  const auto toy = testing::toy_quadratic_instance();
  final_distance(toy, toy.reference()->x, toy.reference()->y);

  // Orthonormal design: x* = soft(Qᵀb, λ), y* = Qx* − b.
  Rng rng(13);
  const Matrix Q = testing::random_orthonormal(rng, 6);
  const Vector b = testing::random_vector(rng, 6);
  Vector xs = Q.transpose() * b;
  for (auto& c : xs) c = std::copysign(std::max(std::abs(c) - 0.4, 0.0), c);
  final_distance(problems::lasso(Q, b, 0.4), xs, Q * xs - b);

  const Vector steps = testing::noisy_steps(16, 14);
  final_distance(problems::tv_denoise_1d(steps, 0.0), steps, Vector::Zero(16));
  const auto tv = testing::tv_instance(0.05);
  final_distance(tv, tv.reference()->x, tv.reference()->y);

  const auto skew = testing::skew_instance();
  final_distance(skew, Vector::Zero(4), Vector::Zero(3));

  const auto rps = testing::rps_instance();
  auto s = SolverState::initial(Vector{{1.0, 0.0, 0.0}}, Vector{{0.0, 1.0, 0.0}});
  const auto cfg = scalar_config(rps, 0.9);
  for (long n = 0; n < 50000; ++n) s = solver::step(s, rps, cfg);
  const auto [X, Y] = solver::ergodic_average(s);
  const Vector third = Vector::Constant(3, 1.0 / 3.0);
  const double err = std::max((X - third).lpNorm<Eigen::Infinity>(),
                              (Y - third).lpNorm<Eigen::Infinity>());
  o.require(err <= 1e-4, "matrix-game ergodic average off uniform by " + std::to_string(err));
  d << "matrix-game ergodic " << err;
  if (o.pass) o.detail = d.str();
  return o;
}

Outcome certificate_boundary() {
  Outcome o;
  std::ostringstream d;
  for (const auto& p : {testing::toy_quadratic_instance(), testing::lasso_instance(),
                        testing::tv_instance(0.2)}) {
    const double L = solver::estimate_norm(p.C(), 0);
    solver::SolverConfig edge{.geometry1 = Geometry::scalar_quadratic(p.primal_dim(), 1.0 / L),
                              .geometry2 = Geometry::scalar_quadratic(p.dual_dim(), 1.0 / L)};
    const auto at_edge = solver::certify(p, edge);
    o.require(std::abs(at_edge.alpha) <= 1e-12 * at_edge.geom1_modulus,
              p.name() + " boundary alpha " + std::to_string(at_edge.alpha));
    o.require(!at_edge.valid, p.name() + " boundary accepted");
    bool rejected = false;
    try {
      solver::run(p, edge, Vector::Zero(p.primal_dim()), Vector::Zero(p.dual_dim()));
    } catch (const UsageError&) {
      rejected = true;
    }
    o.require(rejected, p.name() + " boundary run not rejected");

    const double tau = std::sqrt(1.0 - 1e-3) / L;
    solver::SolverConfig inside{.geometry1 = Geometry::scalar_quadratic(p.primal_dim(), tau),
                                .geometry2 = Geometry::scalar_quadratic(p.dual_dim(), tau)};
    inside.max_iter = 10;
    const auto cert = solver::certify(p, inside);
    o.require(cert.valid && cert.alpha > 0.0, p.name() + " interior rejected");
    try {
      solver::run(p, inside, Vector::Zero(p.primal_dim()), Vector::Zero(p.dual_dim()));
    } catch (const UsageError&) {
      o.require(false, p.name() + " interior run rejected");
    }
    const auto report =
        bregman::check_joint_condition(inside.geometry1, inside.geometry2, p.C(), cert.alpha,
                                       10000, 7);
    o.require(report.violations == 0, p.name() + " sampled violations");
    d << p.name() << " alpha " << cert.alpha << "; ";
  }
  if (o.pass) o.detail = d.str() + "boundary alpha ~ 0 rejected";
  return o;
}

Outcome operator_properties() {
  Outcome o;
  Rng rng(202);
  const int samples = 200;
  const Eigen::Index n = 5;
  Vector lo(n), hi(n);
  lo << -1, -0.5, -std::numeric_limits<double>::infinity(), 0, -2;
  hi << 1, 0.5, 2, std::numeric_limits<double>::infinity(), -1;
  std::vector<MonotoneMap> ops = {
      MonotoneMap::zero(n),
      MonotoneMap::l1_scaled(n, 0.6),
      MonotoneMap::quadratic_shift(testing::random_vector(rng, n)),
      MonotoneMap::box_normal_cone(lo, hi),
      MonotoneMap::simplex_normal_cone(n),
      MonotoneMap::linear(testing::random_psd(rng, n, 2), testing::random_skew(rng, n)),
      MonotoneMap::linear(Matrix::Zero(n, n), testing::random_skew(rng, n)),
  };
  for (std::size_t k = 1; k < 7; ++k) ops.push_back(MonotoneMap::inverse_of(ops[k]));

  int firm = 0, moreau = 0, adjoint = 0, simplex = 0, norms = 0;
  for (const auto& m : ops) {
    for (int k = 0; k < samples; ++k) {
      const double t = std::exp(testing::uniform(rng, -2, 2));
      const Vector z = testing::random_vector(rng, n, 2.0);
      const Vector zp = testing::random_vector(rng, n, 2.0);
      const Vector d = monotone::resolvent(m, t, z) - monotone::resolvent(m, t, zp);
      o.require(d.squaredNorm() <= d.dot(z - zp) + 1e-10, "firm nonexpansiveness: " + m.describe());
      ++firm;
      if (m.kind() == monotone::Kind::zero) continue;
      const Vector split = monotone::resolvent(m, 1.0, z) +
                           monotone::resolvent(MonotoneMap::inverse_of(m), 1.0, z);
      o.require((split - z).norm() <= 1e-10, "Moreau decomposition: " + m.describe());
      ++moreau;
    }
  }
  for (int k = 0; k < samples; ++k) {
    const auto rows = static_cast<Eigen::Index>(1 + k % 7);
    const auto cols = static_cast<Eigen::Index>(1 + (k / 7) % 5);
    auto map = hilbert::LinearMap::dense(testing::random_matrix(rng, rows, cols));
    if (k % 3 == 1) map = hilbert::LinearMap::compose(hilbert::LinearMap::forward_difference(rows), map);
    const Vector x = testing::random_vector(rng, cols);
    const Vector y = testing::random_vector(rng, rows);
    const Vector lx = map.apply(x);
    o.require(std::abs(lx.dot(y) - x.dot(map.adjoint_apply(y))) <=
                  1e-12 * (1.0 + lx.norm() * y.norm()),
              "adjoint consistency");
    ++adjoint;

    const auto dim = static_cast<Eigen::Index>(1 + k % 6);
    const Vector v = testing::random_vector(rng, dim, 1.5);
    o.require((monotone::project_simplex(v) - testing::simplex_by_enumeration(v)).norm() <= 1e-12,
              "simplex projection");
    ++simplex;

    const Matrix a = testing::random_matrix(rng, 2 + k % 10, 2 + (k / 10) % 10);
    const Eigen::JacobiSVD<Matrix> svd(a);
    const double est = hilbert::operator_norm_estimate(hilbert::LinearMap::dense(a), 1e-12, 1000000,
                                                       static_cast<std::uint64_t>(k));
    o.require(std::abs(est - svd.singularValues()(0)) <= 1e-6, "power iteration vs SVD");
    ++norms;
  }
  if (o.pass)
    o.detail = std::to_string(firm) + " firm, " + std::to_string(moreau) + " Moreau, " +
               std::to_string(adjoint) + " adjoint, " + std::to_string(simplex) + " simplex, " +
               std::to_string(norms) + " norm samples";
  return o;
}

Outcome rate_behavior() {
  Outcome o;
  const auto p = testing::toy_quadratic_instance();
  const auto cfg = scalar_config(p, 0.9);
  auto s = SolverState::initial(ones_like(4, 1.0), ones_like(3, -0.5));
  std::vector<MetricsRow> rows;
  long next = 100;
  for (long n = 1; n <= 10000; ++n) {
    s = solver::step(s, p, cfg);
    if (n != next) continue;
    const auto [X, Y] = solver::ergodic_average(s);
    const auto w = diagnostics::resolvent_witness(p, X, Y);
    MetricsRow r;
    r.n = n;
    r.ergodic_gap_lhs = diagnostics::gap_lower_bound(p, w, X, Y);
    rows.push_back(r);
    next = std::min<long>(10000, static_cast<long>(std::ceil(static_cast<double>(n) * 1.25)));
  }
  const double slope =
      diagnostics::rate_fit(rows, diagnostics::MetricField::ergodic_gap_lhs, {100, 10000});
  o.require(slope <= -0.9, "slope " + std::to_string(slope));
  if (o.pass) o.detail = "slope " + std::to_string(slope) + " over " + std::to_string(rows.size()) + " rows";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 quadratic equivalence", quadratic_equivalence},
      {"2 Lyapunov monotonicity", [] { return lyapunov_and_boundedness(false); }},
      {"3 ergodic gap sandwich", ergodic_sandwich},
      {"4 ergodic boundedness", [] { return lyapunov_and_boundedness(true); }},
      {"5 convergence to oracle", convergence_to_oracle},
      {"6 certificate boundary", certificate_boundary},
      {"7 operator properties", operator_properties},
      {"8 rate behavior", rate_behavior},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %s: %s (%s)\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str());
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
