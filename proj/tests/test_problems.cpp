#include <doctest.h>

#include "pdhg/errors.hpp"
#include "pdhg/problems.hpp"
#include "support.hpp"

#include <string>

using namespace pdhg;
using nlohmann::json;
using testing::Rng;

namespace {

double duality_gap_at_reference(const problems::ProblemInstance& p) {
  const auto& fv = *p.function_values();
  const auto& [x, y] = problems::reference_solution(p);
  const Vector cx = p.C().apply(x);
  const Vector cty = p.C().adjoint_apply(y);
  return fv.f1(x) + fv.f2(cx) + fv.f1_conj(-cty) + fv.f2_conj(y);
}

std::string build_error(std::string_view name, const json& params) {
  try {
    problems::build(name, params);
  } catch (const UsageError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("toy-quadratic reference") {
  const auto p = problems::build("toy-quadratic", json{{"a", {1.0}}, {"b", {0.0}}, {"C", {{1.0}}}});
  const auto [x, y] = problems::reference_solution(p);
  CHECK(x[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(y[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(problems::kkt_residual(p, x, y) <= 1e-12);
  CHECK(problems::kkt_residual(p, Vector{{0.0}}, Vector{{0.0}}) == doctest::Approx(0.5));

  // Larger instance: x* solves (I + CᵀC)x = a + Cᵀb independently of the builder.
  Rng rng(41);
  const Vector a = testing::random_vector(rng, 4);
  const Vector b = testing::random_vector(rng, 3);
  const Matrix C = testing::random_matrix(rng, 3, 4);
  const auto big = problems::toy_quadratic(a, b, C);
  const Matrix normal = Matrix::Identity(4, 4) + C.transpose() * C;
  const Vector xs = normal.ldlt().solve(a + C.transpose() * b);
  CHECK((problems::reference_solution(big).first - xs).norm() <= 1e-12);
  CHECK((problems::reference_solution(big).second - (C * xs - b)).norm() <= 1e-12);
  CHECK(std::abs(duality_gap_at_reference(big)) <= 1e-10);
}

TEST_CASE("lasso reference") {
  SUBCASE("orthonormal design has a soft-threshold solution") {
    Rng rng(42);
    const Matrix Q = testing::random_orthonormal(rng, 6);
    const Vector b = testing::random_vector(rng, 6);
    const double lambda = 0.4;
    const auto p = problems::lasso(Q, b, lambda);
    Vector expected = Q.transpose() * b;
    for (auto& c : expected) c = std::copysign(std::max(std::abs(c) - lambda, 0.0), c);
    CHECK((problems::reference_solution(p).first - expected).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK((problems::lasso_oracle(Q, b, lambda) - expected).lpNorm<Eigen::Infinity>() <= 1e-10);
  }

  SUBCASE("general design satisfies the subgradient conditions") {
    const auto p = testing::lasso_instance();
    Rng rng(12);
    const Matrix C = testing::random_matrix(rng, 8, 5);
    const Vector b = testing::random_vector(rng, 8);
    const Vector x = problems::reference_solution(p).first;
    const Vector g = C.transpose() * (C * x - b);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (std::abs(x[i]) > 1e-9)
        CHECK(g[i] == doctest::Approx(-0.5 * (x[i] > 0 ? 1.0 : -1.0)).epsilon(1e-8));
      else
        CHECK(std::abs(g[i]) <= 0.5 + 1e-8);
    }
    CHECK(std::abs(duality_gap_at_reference(p)) <= 1e-8);
  }

  SUBCASE("2-dim instance with a zero solution") {
    Matrix C = Matrix::Identity(2, 2);
    const auto p = problems::lasso(C, Vector{{1.0, 0.0}}, 10.0);
    CHECK(problems::reference_solution(p).first.norm() == 0.0);
    CHECK((problems::reference_solution(p).second - Vector{{-1.0, 0.0}}).norm() <= 1e-14);
  }
}

TEST_CASE("tv-denoise-1d reference") {
  const Vector b = testing::noisy_steps(16, 14);
  CHECK((problems::reference_solution(problems::tv_denoise_1d(b, 0.0)).first - b).norm() == 0.0);

  for (double lambda : {0.05, 0.3}) {
    const auto p = problems::tv_denoise_1d(b, lambda);
    const auto [x, y] = problems::reference_solution(p);
    const auto D = hilbert::LinearMap::forward_difference(16);
    const Vector dx = D.apply(x);
    // Optimality: x = b − Dᵀy, |y| ≤ λ, and y matches λ·sign(Dx) off the flat set.
    CHECK((x - (b - D.adjoint_apply(y))).norm() <= 1e-12);
    CHECK(y.lpNorm<Eigen::Infinity>() <= lambda + 1e-12);
    for (Eigen::Index i = 0; i < 16; ++i)
      if (std::abs(dx[i]) > 1e-7) CHECK(std::abs(y[i] - std::copysign(lambda, dx[i])) <= 1e-8);
    CHECK(std::abs(duality_gap_at_reference(p)) <= 1e-8);
  }
}

TEST_CASE("matrix-game reference") {
  const auto p = testing::rps_instance();
  const auto [x, y] = problems::reference_solution(p);
  const Vector third = Vector::Constant(3, 1.0 / 3.0);
  CHECK((x - third).norm() <= 1e-15);
  CHECK((y - third).norm() <= 1e-15);
  CHECK(std::abs(duality_gap_at_reference(p)) <= 1e-12);

  CHECK(problems::is_circulant(testing::rock_paper_scissors()));
  Matrix general(2, 3);
  general << 1, 2, 0, 0, 1, 3;
  CHECK_FALSE(problems::is_circulant(general));
  const auto g = problems::matrix_game(general);
  CHECK_FALSE(g.reference().has_value());
  CHECK_THROWS_AS(problems::reference_solution(g), UnsupportedCapability);
}

TEST_CASE("skew-inclusion reference") {
  const auto p = testing::skew_instance();
  const auto [x, y] = problems::reference_solution(p);
  CHECK(x.norm() == 0.0);
  CHECK(y.norm() == 0.0);
  CHECK(problems::kkt_residual(p, x, y) == 0.0);
  CHECK_FALSE(p.function_values().has_value());

  Rng rng(43);
  CHECK(problems::kkt_residual(p, testing::random_vector(rng, 4), testing::random_vector(rng, 3)) >
        0.0);
  CHECK_THROWS_AS(problems::skew_inclusion(Matrix::Identity(2, 2), Matrix::Identity(2, 2)),
                  UsageError);
}

TEST_CASE("every catalog reference passes the KKT check") {
  for (const auto& p : {testing::toy_quadratic_instance(), testing::lasso_instance(),
                        testing::orthonormal_lasso_instance(), testing::tv_instance(0.2),
                        testing::skew_instance(), testing::rps_instance()}) {
    CAPTURE(p.name());
    const auto [x, y] = problems::reference_solution(p);
    CHECK(problems::kkt_residual(p, x, y) <= 1e-8);
  }
}

TEST_CASE("build schema errors") {
  CHECK(problems::catalog_names().size() == 5);

  const auto unknown = build_error("lassoo", json::object());
  CHECK(unknown.find("unknown problem 'lassoo'") != std::string::npos);
  CHECK(unknown.find("tv-denoise-1d") != std::string::npos);

  const auto missing = build_error("lasso", json{{"C", {{1.0}}}, {"b", {1.0}}});
  CHECK(missing.find("missing parameter 'lambda'") != std::string::npos);
  CHECK(missing.find("expected params") != std::string::npos);

  const auto extra =
      build_error("tv-denoise-1d", json{{"b", {1.0, 2.0}}, {"lambda", 0.1}, {"mu", 1}});
  CHECK(extra.find("unknown parameter 'mu'") != std::string::npos);

  CHECK(!build_error("toy-quadratic", json{{"a", {1.0, 2.0}}, {"b", {0.0}}, {"C", {{1.0}}}})
             .empty());
  CHECK(!build_error("matrix-game", json{{"payoff", {{1.0, 2.0}, {3.0}}}}).empty());
  CHECK(!build_error("lasso", json{{"C", {{1.0}}}, {"b", {1.0}}, {"lambda", -1.0}}).empty());
  CHECK(!build_error("lasso", json{{"C", {{1.0}}}, {"b", {"x"}}, {"lambda", 1.0}}).empty());

  const auto game = problems::build("matrix-game", json{{"payoff", {{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}}}});
  CHECK(game.reference().has_value());
  CHECK(game.primal_dim() == 3);
}
