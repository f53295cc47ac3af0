#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "pdhg/engine.hpp"
#include "pdhg/prox.hpp"
#include "pdhg/saddle_problem.hpp"

namespace pdhg {

/// Lasso: f = 1/2||Ax - b||^2, g = lambda ||.||_1, F = I, so g* is the
/// indicator of the l_inf ball of radius lambda. mu = lambda_min(A^T A).
SaddleProblem make_lasso(const Matrix& a, const Vector& b, double lambda);

/// Generalized Lasso: as make_lasso with a user coupling F (d2 x d1).
SaddleProblem make_generalized_lasso(const Matrix& a, const Vector& b, double lambda,
                                     const Matrix& coupling);

/// (d-1) x d first-difference matrix, rows (..., -1, +1, ...).
Matrix difference_matrix(Eigen::Index d);

/// f = (mu/2)||x - a||^2, g* = (gamma/2)||y - b_hat||^2.
struct QuadPairData {
  Vector shift_x;  // a
  Vector shift_y;  // b_hat
  double mu;
  double gamma;
  Matrix coupling;
};

/// Solves [[mu I, F^T], [-F, gamma I]] (x*, y*) = (mu a, gamma b_hat).
PrimalDualPair kkt_oracle(const QuadPairData& data);

struct QuadPair {
  SaddleProblem problem;
  PrimalDualPair saddle;
};

QuadPair make_quad_pair(const Vector& shift_x, const Vector& shift_y, double mu, double gamma,
                        const Matrix& coupling);

struct SaddleCertificate {
  bool pass;
  double r_x;  // dist(0, df(x) + F^T y)
  double r_y;  // dist(0, dg*(y) - F x)
};

/// PASS iff both saddle inclusion residuals are <= tol.
SaddleCertificate certify_saddle(const SaddleProblem& problem, const PrimalDualPair& candidate,
                                 double tol);

struct ReferenceSolution {
  PrimalDualPair saddle;
  SaddleCertificate certificate;
  long iterations;
};

/// High-accuracy saddle point for instances without a closed form: a long
/// fixed-regime run (tau = sigma = 0.9/||F||) to residual `tol`, then
/// certification at `certify_tol`.
ReferenceSolution reference_saddle(const SaddleProblem& problem, double tol = 1e-12,
                                   long budget = 5'000'000, double certify_tol = 1e-8);

enum class InstanceKind { lasso, gen_lasso, quad_pair };
std::string_view to_string(InstanceKind kind);
InstanceKind instance_kind_from_string(std::string_view name);

/// Seeded benchmark instance. Rebuilding from an equal InstanceSpec is bitwise identical.
struct InstanceSpec {
  InstanceKind kind = InstanceKind::quad_pair;
  std::uint64_t seed = 1;
  Eigen::Index d1 = 4;
  /// Dual dimension (quad_pair only; lasso uses d1, gen_lasso d1 - 1).
  Eigen::Index d2 = 4;
  /// Rows of A (lasso only).
  Eigen::Index m = 8;
  double lambda = 1.0;
  double mu = 1.0;
  double gamma = 1.0;
  /// Singular values of A span [a_min_singular, a_min_singular * a_condition]
  /// (lasso); mu of the instance is a_min_singular^2.
  double a_min_singular = 1.0;
  double a_condition = 4.0;
  /// Spectral norm of the random coupling (quad_pair).
  double f_scale = 1.0;

  bool operator==(const InstanceSpec&) const = default;
};

struct Instance {
  InstanceSpec spec;
  SaddleProblem problem;
  /// Exact saddle for quad pairs; absent otherwise.
  std::optional<PrimalDualPair> exact_saddle;
  /// Data behind the problem, kept for reporting and objective evaluation.
  Matrix a;
  Vector b;
  std::optional<QuadPairData> quad;
};

Instance build_instance(const InstanceSpec& spec);

/// m x d matrix U diag(sv) V^T with Haar-like orthonormal factors drawn from `seed`.
Matrix random_matrix_with_singular_values(Eigen::Index m, Eigen::Index d, const Vector& sv,
                                          std::uint64_t seed);

}  // namespace pdhg
