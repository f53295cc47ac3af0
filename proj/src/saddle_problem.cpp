#include "pdhg/saddle_problem.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <utility>

namespace pdhg {

SaddleProblem::SaddleProblem(Matrix coupling, ProblemOracles oracles, double mu, double gamma)
    : coupling_(std::move(coupling)), oracles_(std::move(oracles)), mu_(mu), gamma_(gamma) {
  if (coupling_.rows() < 1 || coupling_.cols() < 1) {
    throw std::invalid_argument("SaddleProblem: coupling matrix must be non-empty");
  }
  if (!oracles_.prox_f || !oracles_.prox_gstar) {
    throw std::invalid_argument("SaddleProblem: prox_f and prox_gstar are required");
  }
  if (!(mu_ >= 0.0) || !(gamma_ >= 0.0)) {
    throw std::invalid_argument("SaddleProblem: mu and gamma must be >= 0");
  }
}

Vector SaddleProblem::grad_f(const Vector& x) const {
  if (!oracles_.grad_f) throw MissingOracleError("grad_f oracle not supplied");
  return oracles_.grad_f(x);
}

Vector SaddleProblem::grad_gstar(const Vector& y) const {
  if (!oracles_.grad_gstar) throw MissingOracleError("grad_gstar oracle not supplied");
  return oracles_.grad_gstar(y);
}

double SaddleProblem::subdiff_f_distance(const Vector& x, const Vector& offset) const {
  if (!oracles_.subdiff_f) {
    throw MissingOracleError("subdiff_f oracle not supplied; residuals need subdifferential oracles");
  }
  return oracles_.subdiff_f(x, offset);
}

double SaddleProblem::subdiff_gstar_distance(const Vector& y, const Vector& offset) const {
  if (!oracles_.subdiff_gstar) {
    throw MissingOracleError(
        "subdiff_gstar oracle not supplied; residuals need subdifferential oracles");
  }
  return oracles_.subdiff_gstar(y, offset);
}

double SaddleProblem::primal_objective(const Vector& x) const {
  if (!oracles_.primal_objective) throw MissingOracleError("primal objective not supplied");
  return oracles_.primal_objective(x);
}

double operator_norm(const Matrix& coupling, double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("operator_norm: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("operator_norm: max_iter must be positive");
  const Eigen::Index n = coupling.cols();
  if (n == 0 || coupling.rows() == 0 || coupling.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  // Normalized all-ones vector plus a small seeded perturbation, so the start
  // is never orthogonal to the dominant singular vector by construction.
  std::mt19937_64 rng(kPowerIterationSeed);
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + jitter(rng);
  v.normalize();

  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Vector w = coupling.transpose() * (coupling * v);
    lambda = v.dot(w);
    const double residual = (w - lambda * v).norm();
    if (residual <= tol * lambda) return std::sqrt(lambda);
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
  }
  std::ostringstream msg;
  msg << "operator_norm: power iteration did not converge in " << max_iter
      << " iterations (last estimate " << std::sqrt(std::max(lambda, 0.0)) << ")";
  throw NonConvergenceError(msg.str(), std::sqrt(std::max(lambda, 0.0)));
}

Admissibility check_admissibility(double s, double f_norm) {
  const double margin = 1.0 - s * f_norm;
  return {margin > 0.0, margin};
}

double default_step_scale(double f_norm) { return f_norm > 0.0 ? 0.9 / f_norm : 0.9; }

}  // namespace pdhg
