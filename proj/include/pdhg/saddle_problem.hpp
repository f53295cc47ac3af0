#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace pdhg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// prox(v, t) = argmin_u h(u) + ||u - v||^2 / (2t)
using ProxFn = std::function<Vector(const Vector&, double)>;
using GradientFn = std::function<Vector(const Vector&)>;
/// Returns dist(0, dh(point) + offset).
using ResidualFn = std::function<double(const Vector& point, const Vector& offset)>;
using ObjectiveFn = std::function<double(const Vector&)>;

class MissingOracleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The oracle set of a saddle problem min_x max_y f(x) + <Fx, y> - g*(y).
/// Only the two prox oracles are mandatory.
struct ProblemOracles {
  ProxFn prox_f;
  ProxFn prox_gstar;
  GradientFn grad_f;
  GradientFn grad_gstar;
  ResidualFn subdiff_f;
  ResidualFn subdiff_gstar;
  /// Primal objective f(x) + g(Fx), when it is cheap to evaluate.
  ObjectiveFn primal_objective;
};

/// Immutable saddle problem: coupling matrix F (d2 x d1), prox oracles for f
/// and g*, and the strong-convexity moduli (mu for f, gamma for g*).
/// Safe to share across concurrent solver runs.
class SaddleProblem {
 public:
  SaddleProblem(Matrix coupling, ProblemOracles oracles, double mu, double gamma);

  Eigen::Index primal_dim() const { return coupling_.cols(); }
  Eigen::Index dual_dim() const { return coupling_.rows(); }
  const Matrix& coupling() const { return coupling_; }
  double mu() const { return mu_; }
  double gamma() const { return gamma_; }

  Vector prox_f(const Vector& v, double t) const { return oracles_.prox_f(v, t); }
  Vector prox_gstar(const Vector& w, double t) const { return oracles_.prox_gstar(w, t); }

  bool has_gradients() const {
    return static_cast<bool>(oracles_.grad_f) && static_cast<bool>(oracles_.grad_gstar);
  }
  bool has_residual_oracles() const {
    return static_cast<bool>(oracles_.subdiff_f) && static_cast<bool>(oracles_.subdiff_gstar);
  }
  bool has_objective() const { return static_cast<bool>(oracles_.primal_objective); }

  // The following throw MissingOracleError when the oracle was not supplied.
  Vector grad_f(const Vector& x) const;
  Vector grad_gstar(const Vector& y) const;
  double subdiff_f_distance(const Vector& x, const Vector& offset) const;
  double subdiff_gstar_distance(const Vector& y, const Vector& offset) const;
  double primal_objective(const Vector& x) const;

 private:
  Matrix coupling_;
  ProblemOracles oracles_;
  double mu_;
  double gamma_;
};

struct PrimalDualPair {
  Vector x;
  Vector y;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double last_estimate)
      : std::runtime_error(what), last_estimate_(last_estimate) {}
  double last_estimate() const { return last_estimate_; }

 private:
  double last_estimate_;
};

inline constexpr std::uint64_t kPowerIterationSeed = 0x5eed'00f1'a7e5'0001ULL;

/// Largest singular value of `coupling` by power iteration on F^T F.
/// Stops once the eigen-residual ||F^T F v - lambda v|| drops below
/// tol * lambda. Returns 0 for the zero matrix.
double operator_norm(const Matrix& coupling, double tol = 1e-10, int max_iter = 500000);

struct Admissibility {
  bool admissible;
  /// 1 - s * ||F||; positive iff admissible.
  double margin;
};

/// Step scale s is admissible iff s * ||F|| < 1.
Admissibility check_admissibility(double s, double f_norm);

/// s = 0.9 / ||F||, or 0.9 for a zero coupling.
double default_step_scale(double f_norm);

}  // namespace pdhg
