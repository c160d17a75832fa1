#pragma once

// Random instance generators shared by the unit and acceptance suites.

#include "pdhg/hilbert.hpp"
#include "pdhg/problems.hpp"

#include <cstdint>
#include <limits>
#include <random>

namespace pdhg::testing {

using Rng = std::mt19937_64;

inline Vector random_vector(Rng& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (auto& c : v) c = normal(rng);
  return v;
}

inline Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

inline Matrix random_skew(Rng& rng, Eigen::Index n) {
  const Matrix m = random_matrix(rng, n, n);
  return m - m.transpose();
}

inline Matrix random_psd(Rng& rng, Eigen::Index n, Eigen::Index rank) {
  const Matrix f = random_matrix(rng, n, rank);
  return f * f.transpose();
}

inline Matrix random_orthonormal(Rng& rng, Eigen::Index n) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, n, n));
  return qr.householderQ() * Matrix::Identity(n, n);
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Projection onto the simplex by enumerating every support pattern and
// keeping the feasible KKT candidate closest to z.
inline Vector simplex_by_enumeration(const Vector& z) {
  const auto n = z.size();
  Vector best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    double sum = 0.0;
    int count = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        sum += z[i];
        ++count;
      }
    const double theta = (sum - 1.0) / count;
    Vector x = Vector::Zero(n);
    bool ok = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        x[i] = z[i] - theta;
        if (x[i] < 0.0) ok = false;
      } else if (z[i] - theta > 0.0) {
        ok = false;
      }
    }
    if (ok && (x - z).norm() < best_dist) {
      best = x;
      best_dist = (x - z).norm();
    }
  }
  return best;
}

inline Matrix rock_paper_scissors() {
  Matrix m(3, 3);
  m << 0, -1, 1,
       1, 0, -1,
       -1, 1, 0;
  return m;
}

/// Fixed-seed catalog instances used across suites.
inline problems::ProblemInstance toy_quadratic_instance() {
  Rng rng(11);
  return problems::toy_quadratic(random_vector(rng, 4), random_vector(rng, 3),
                                 random_matrix(rng, 3, 4));
}

inline problems::ProblemInstance lasso_instance() {
  Rng rng(12);
  const Matrix C = random_matrix(rng, 8, 5);
  return problems::lasso(C, random_vector(rng, 8), 0.5);
}

inline problems::ProblemInstance orthonormal_lasso_instance() {
  Rng rng(13);
  return problems::lasso(random_orthonormal(rng, 6), random_vector(rng, 6), 0.4);
}

inline Vector noisy_steps(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  Vector b(n);
  for (Eigen::Index i = 0; i < n; ++i) b[i] = (i < n / 3 ? 0.0 : i < 2 * n / 3 ? 1.0 : -0.5);
  return b + random_vector(rng, n, 0.1);
}

inline problems::ProblemInstance tv_instance(double lambda) {
  return problems::tv_denoise_1d(noisy_steps(16, 14), lambda);
}

inline problems::ProblemInstance skew_instance() {
  Rng rng(15);
  return problems::skew_inclusion(random_skew(rng, 4), random_matrix(rng, 3, 4));
}

inline problems::ProblemInstance rps_instance() {
  return problems::matrix_game(rock_paper_scissors());
}

}  // namespace pdhg::testing
