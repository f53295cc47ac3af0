#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "pdhg/prox.hpp"

using namespace pdhg;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Minimizes t|u| + (u - v)^2 / 2 by golden-section search on a bracket.
double scalar_l1_prox_oracle(double v, double t) {
  double lo = -std::abs(v) - 1.0;
  double hi = std::abs(v) + 1.0;
  auto obj = [&](double u) { return t * std::abs(u) + 0.5 * (u - v) * (u - v); };
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double a = hi - g * (hi - lo);
    const double b = lo + g * (hi - lo);
    if (obj(a) < obj(b)) hi = b; else lo = a;
  }
  return 0.5 * (lo + hi);
}

Vector random_vector(int d, std::mt19937_64& rng, double scale = 2.0) {
  std::normal_distribution<double> n(0.0, scale);
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = n(rng);
  return v;
}

Matrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

}  // namespace

TEST_CASE("soft_threshold examples") {
  const Vector out = soft_threshold(vec({3, -0.5, 0}), 1.0);
  CHECK(out[0] == doctest::Approx(2.0));
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 0.0);
  for (int i = 0; i < 3; ++i) {
    const double v = vec({3, -0.5, 0})[i];
    CHECK(std::abs(out[i] - scalar_l1_prox_oracle(v, 1.0)) <= 1e-7);
  }

  const Vector v = vec({1.5, -2.25, 0.0, 1e-300});
  CHECK(soft_threshold(v, 0.0) == v);

  const Vector tie = soft_threshold(vec({-2}), 2.0);
  CHECK(tie[0] == 0.0);
  CHECK_FALSE(std::signbit(tie[0]));
  CHECK_THROWS_AS(soft_threshold(v, -1.0), std::invalid_argument);
}

TEST_CASE("soft_threshold agrees with a scalar search oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector v = random_vector(5, rng);
    const double t = std::abs(random_vector(1, rng)[0]);
    const Vector p = soft_threshold(v, t);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(p[i] - scalar_l1_prox_oracle(v[i], t)) <= 1e-7);
  }
}

TEST_CASE("project_linf_ball examples") {
  const Vector p = project_linf_ball(vec({2, -0.3}), 1.0);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == -0.3);
  const Vector inside = vec({0.2, -0.9, 0.0});
  CHECK(project_linf_ball(inside, 1.0) == inside);
  CHECK(project_linf_ball(vec({5}), 0.0)[0] == 0.0);
}

TEST_CASE("prox_shifted_quadratic examples") {
  CHECK(prox_shifted_quadratic(vec({0}), 1.0, vec({2}), 1.0)[0] == doctest::Approx(1.0));
  const Vector a = vec({0.3, -7.0});
  CHECK((prox_shifted_quadratic(a, 2.5, a, 0.7) - a).norm() <= 1e-15);
  // (u - 1)^2 + (u - 4)^2 is minimized at u = 2.5; (v + t m a)/(1 + t m) = 5/2 agrees.
  CHECK(prox_shifted_quadratic(vec({1}), 2.0, vec({4}), 0.5)[0] == doctest::Approx(2.5));
}

TEST_CASE("prox_least_squares examples") {
  const QuadraticProxCache c1(Matrix::Identity(1, 1), vec({0}));
  CHECK(prox_least_squares(c1, vec({2}), 1.0)[0] == doctest::Approx(1.0));
  const QuadraticProxCache c2(Matrix::Identity(1, 1), vec({4}));
  CHECK(prox_least_squares(c2, vec({0}), 1.0)[0] == doctest::Approx(2.0));

  std::mt19937_64 rng(17);
  const Matrix a = random_matrix(6, 4, rng);
  const Vector b = random_vector(6, rng);
  const Vector v = random_vector(4, rng);
  const QuadraticProxCache c3(a, b);
  CHECK((prox_least_squares(c3, v, 1e-12) - v).norm() <= 1e-6);
}

TEST_CASE("QuadraticProxCache spectral invariants") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_matrix(12, 7, rng);
    const QuadraticProxCache cache(a, random_vector(12, rng));
    const Matrix ata = a.transpose() * a;
    const Matrix rebuilt =
        cache.eigenvectors() * cache.eigenvalues().asDiagonal() * cache.eigenvectors().transpose();
    CHECK((rebuilt - ata).norm() <= 1e-8 * ata.norm());
    for (Eigen::Index i = 1; i < cache.eigenvalues().size(); ++i) {
      CHECK(cache.eigenvalues()[i - 1] <= cache.eigenvalues()[i]);
    }
    // Independent dense solve for lambda_min via the singular values of A.
    const Eigen::JacobiSVD<Matrix> svd(a);
    const double smin = svd.singularValues().minCoeff();
    CHECK(std::abs(cache.strong_convexity() - smin * smin) <= 1e-8 * smin * smin);
  }
  // Rank-deficient A records mu = 0.
  const Matrix wide = random_matrix(3, 6, rng);
  CHECK(QuadraticProxCache(wide, random_vector(3, rng)).strong_convexity() == 0.0);
}

TEST_CASE("prox_least_squares matches a direct dense solve up to d = 50") {
  std::mt19937_64 rng(31);
  for (int d : {1, 5, 20, 50}) {
    const Matrix a = random_matrix(d + 3, d, rng);
    const Vector b = random_vector(d + 3, rng);
    const QuadraticProxCache cache(a, b);
    for (double t : {1e-3, 0.5, 10.0}) {
      const Vector v = random_vector(d, rng);
      const Matrix system = Matrix::Identity(d, d) + t * a.transpose() * a;
      const Vector rhs = v + t * a.transpose() * b;
      const Vector ref = system.ldlt().solve(rhs);
      const Vector u = prox_least_squares(cache, v, t);
      CHECK((u - ref).norm() <= 1e-9 * ref.norm());
      CHECK((system * u - rhs).norm() <= 1e-9 * (1.0 + v.norm()) * (1.0 + t * a.squaredNorm()));
    }
  }
}

TEST_CASE("every prox is nonexpansive") {
  std::mt19937_64 rng(41);
  const Matrix a = random_matrix(8, 5, rng);
  const QuadraticProxCache cache(a, random_vector(8, rng));
  const Vector shift = random_vector(5, rng);
  for (double t : {0.1, 1.0, 3.0}) {
    for (int trial = 0; trial < 100; ++trial) {
      const Vector v1 = random_vector(5, rng);
      const Vector v2 = random_vector(5, rng);
      const double gap = (v1 - v2).norm();
      CHECK((soft_threshold(v1, t) - soft_threshold(v2, t)).norm() <= gap + 1e-14);
      CHECK((project_linf_ball(v1, t) - project_linf_ball(v2, t)).norm() <= gap + 1e-14);
      CHECK((prox_least_squares(cache, v1, t) - prox_least_squares(cache, v2, t)).norm() <=
            gap + 1e-12);
      CHECK((prox_shifted_quadratic(shift, 2.0, v1, t) -
             prox_shifted_quadratic(shift, 2.0, v2, t)).norm() <= gap + 1e-14);
    }
  }
}

TEST_CASE("prox optimality inclusions") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector v = random_vector(6, rng);
    const double t = 0.1 + std::abs(random_vector(1, rng)[0]);
    // l1: 0 in t d||p||_1 + p - v, coordinate by coordinate.
    const Vector p = soft_threshold(v, t);
    for (int i = 0; i < 6; ++i) {
      const double r = p[i] != 0.0 ? std::abs(t * (p[i] > 0 ? 1.0 : -1.0) + p[i] - v[i])
                                   : std::max(0.0, std::abs(v[i]) - t);
      CHECK(r <= 1e-9 * (1.0 + v.norm()));
    }
    CHECK(l1_subdiff_distance(p, t, p - v) <= 1e-9 * (1.0 + v.norm()));
    // l_inf ball projection: v - p lies in the normal cone at p.
    const Vector q = project_linf_ball(v, t);
    CHECK(linf_ball_normal_distance(q, t, q - v) <= 1e-9 * (1.0 + v.norm()));
  }
}

TEST_CASE("subdifferential distance oracles") {
  CHECK(l1_subdiff_distance(vec({1.0}), 2.0, vec({-2.0})) == 0.0);
  CHECK(l1_subdiff_distance(vec({0.0}), 2.0, vec({1.5})) == 0.0);
  CHECK(l1_subdiff_distance(vec({0.0}), 2.0, vec({3.0})) == doctest::Approx(1.0));
  CHECK(linf_ball_normal_distance(vec({0.5}), 1.0, vec({0.25})) == doctest::Approx(0.25));
  CHECK(linf_ball_normal_distance(vec({1.0}), 1.0, vec({-0.25})) == 0.0);
  CHECK(linf_ball_normal_distance(vec({1.0}), 1.0, vec({0.25})) == doctest::Approx(0.25));
  CHECK(std::isinf(linf_ball_normal_distance(vec({1.5}), 1.0, vec({0.0}))));
}
