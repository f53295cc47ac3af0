#pragma once

#include "pdhg/saddle_problem.hpp"

namespace pdhg {

/// Prox of t * ||.||_1: sign(v_i) * max(|v_i| - t, 0). Ties |v_i| = t map to 0.
Vector soft_threshold(const Vector& v, double t);

/// Euclidean projection onto {y : ||y||_inf <= r}. This is the prox of the
/// conjugate of r * ||.||_1 for every step size.
Vector project_linf_ball(const Vector& w, double r);

/// Prox of (m/2) ||u - a||^2: (v + t m a) / (1 + t m).
Vector prox_shifted_quadratic(const Vector& a, double m, const Vector& v, double t);

/// Spectral factorization of A^T A for f(x) = 1/2 ||Ax - b||^2, computed once
/// so that prox evaluations at varying step sizes cost two products with V.
class QuadraticProxCache {
 public:
  QuadraticProxCache(Matrix a, Vector b);

  const Matrix& a() const { return a_; }
  const Vector& b() const { return b_; }
  const Matrix& eigenvectors() const { return eigvecs_; }
  /// Ascending, clamped at zero.
  const Vector& eigenvalues() const { return eigvals_; }
  const Vector& atb() const { return atb_; }

  /// lambda_min(A^T A), with eigenvalues below 1e-12 * lambda_max treated as
  /// an exact zero (rank deficient A).
  double strong_convexity() const;

  double value(const Vector& x) const { return 0.5 * (a_ * x - b_).squaredNorm(); }
  Vector gradient(const Vector& x) const { return a_.transpose() * (a_ * x - b_); }

 private:
  Matrix a_;
  Vector b_;
  Matrix eigvecs_;
  Vector eigvals_;
  Vector atb_;
};

/// Solves (I + t A^T A) u = v + t A^T b through the cached decomposition.
Vector prox_least_squares(const QuadraticProxCache& cache, const Vector& v, double t);

/// dist(0, lambda * d||x||_1 + offset), evaluated coordinate-wise with exact
/// interval membership at x_i = 0.
double l1_subdiff_distance(const Vector& x, double lambda, const Vector& offset);

/// dist(0, N_B(y) + offset) where N_B is the normal cone of the l_inf ball of
/// radius r. Points outside the ball are at infinite distance.
double linf_ball_normal_distance(const Vector& y, double r, const Vector& offset);

}  // namespace pdhg
