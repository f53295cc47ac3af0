#pragma once

#include <stdexcept>
#include <vector>

#include "pdhg/saddle_problem.hpp"

namespace pdhg {

struct OdeState {
  Vector x;
  Vector y;
  double t = 0.0;
};

/// Scales of the high-resolution system
///   (s/tau) X' - s F^T Y' = -F^T Y - grad f(X)
///   (s/sigma) Y' - s F X' =  F X  - grad g*(Y)
struct OdeScales {
  double s;
  double tau;
  double sigma;
};

class OdeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One implicit-Euler step M (z' - z) / h = G(z') for the stacked state
/// z = (X, Y), solved by Newton's method with a finite-difference Jacobian of
/// the gradient oracles. Quadratic instances converge in one or two Newton
/// iterations. h = 0 returns the state unchanged.
///
/// Throws OdeError when the mass matrix is singular or Newton stalls, and
/// MissingOracleError without gradient oracles.
OdeState hires_ode_step(const SaddleProblem& problem, const OdeState& state, double h,
                        const OdeScales& scales);

/// ceil(horizon / h) implicit-Euler steps; the returned list starts with `init`.
std::vector<OdeState> integrate(const SaddleProblem& problem, const OdeState& init,
                                double horizon, double h, const OdeScales& scales);

/// E(t) = ||X - x*||^2/(2tau) + ||Y - y*||^2/(2sigma) - <F(X - x*), Y - y*>.
double continuous_lyapunov(const Vector& x, const Vector& y, const PrimalDualPair& saddle,
                           double tau, double sigma, const Matrix& coupling);

struct DiscreteContinuousGap {
  double s;
  /// sup_k ||(x_k, y_k) - (X(ks), Y(ks))|| over ks <= horizon.
  double sup_distance;
  long iterations;
};

/// Runs fixed-step PDHG (tau = tau_over_s * s, sigma = s / tau_over_s, theta = 1)
/// next to an implicit-Euler reference of step s / reference_refinement and
/// reports the largest distance at the common times t_k = k s.
DiscreteContinuousGap discrete_continuous_gap(const SaddleProblem& problem,
                                              const PrimalDualPair& init, double s,
                                              double tau_over_s, double horizon,
                                              int reference_refinement = 100);

}  // namespace pdhg
