#include "pdhg/ode.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "pdhg/engine.hpp"
#include "pdhg/lyapunov.hpp"

namespace pdhg {

namespace {

constexpr double kNewtonTolerance = 1e-10;
constexpr int kNewtonMaxIter = 50;

Matrix mass_matrix(const Matrix& coupling, const OdeScales& sc) {
  const Eigen::Index d1 = coupling.cols();
  const Eigen::Index d2 = coupling.rows();
  Matrix m(d1 + d2, d1 + d2);
  m.topLeftCorner(d1, d1) = (sc.s / sc.tau) * Matrix::Identity(d1, d1);
  m.topRightCorner(d1, d2) = -sc.s * coupling.transpose();
  m.bottomLeftCorner(d2, d1) = -sc.s * coupling;
  m.bottomRightCorner(d2, d2) = (sc.s / sc.sigma) * Matrix::Identity(d2, d2);
  return m;
}

// G(z) = (-F^T Y - grad f(X), F X - grad g*(Y)).
Vector vector_field(const SaddleProblem& problem, const Vector& z) {
  const Matrix& coupling = problem.coupling();
  const Eigen::Index d1 = problem.primal_dim();
  const Eigen::Index d2 = problem.dual_dim();
  const Vector x = z.head(d1);
  const Vector y = z.tail(d2);
  Vector g(d1 + d2);
  g.head(d1) = -(coupling.transpose() * y) - problem.grad_f(x);
  g.tail(d2) = coupling * x - problem.grad_gstar(y);
  return g;
}

Matrix vector_field_jacobian(const SaddleProblem& problem, const Vector& z, const Vector& gz) {
  const Eigen::Index n = z.size();
  Matrix jac(n, n);
  Vector probe = z;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double step = 1e-6 * std::max(1.0, std::abs(z[j]));
    probe[j] = z[j] + step;
    jac.col(j) = (vector_field(problem, probe) - gz) / step;
    probe[j] = z[j];
  }
  return jac;
}

}  // namespace

OdeState hires_ode_step(const SaddleProblem& problem, const OdeState& state, double h,
                        const OdeScales& scales) {
  if (!(h >= 0.0)) throw std::invalid_argument("hires_ode_step: h must be >= 0");
  if (!(scales.s > 0.0 && scales.tau > 0.0 && scales.sigma > 0.0)) {
    throw std::invalid_argument("hires_ode_step: s, tau and sigma must be positive");
  }
  if (!problem.has_gradients()) {
    throw MissingOracleError("hires_ode_step: the ODE needs grad_f and grad_gstar oracles");
  }
  if (h == 0.0) return state;

  const Eigen::Index d1 = problem.primal_dim();
  const Eigen::Index d2 = problem.dual_dim();
  const Matrix mass = mass_matrix(problem.coupling(), scales);
  Eigen::FullPivLU<Matrix> mass_lu(mass);
  if (!mass_lu.isInvertible()) {
    throw OdeError("hires_ode_step: mass matrix is singular (need tau sigma = s^2 and s ||F|| < 1)");
  }

  Vector z(d1 + d2);
  z << state.x, state.y;
  Vector z_new = z;
  // Residual R(z') = M (z' - z) / h - G(z').
  Vector g = vector_field(problem, z_new);
  Vector residual = mass * (z_new - z) / h - g;
  for (int it = 0; residual.norm() > kNewtonTolerance; ++it) {
    if (it == kNewtonMaxIter) {
      throw OdeError("hires_ode_step: Newton did not reach residual 1e-10 (last " +
                     std::to_string(residual.norm()) + ")");
    }
    const Matrix jac = mass / h - vector_field_jacobian(problem, z_new, g);
    z_new -= Eigen::PartialPivLU<Matrix>(jac).solve(residual);
    g = vector_field(problem, z_new);
    residual = mass * (z_new - z) / h - g;
  }
  return {z_new.head(d1), z_new.tail(d2), state.t + h};
}

std::vector<OdeState> integrate(const SaddleProblem& problem, const OdeState& init,
                                double horizon, double h, const OdeScales& scales) {
  if (!(horizon > 0.0) || !(h > 0.0)) {
    throw std::invalid_argument("integrate: horizon and h must be positive");
  }
  const long steps = static_cast<long>(std::ceil(horizon / h - 1e-9));
  std::vector<OdeState> out;
  out.reserve(static_cast<size_t>(steps) + 1);
  out.push_back(init);
  for (long i = 0; i < steps; ++i) out.push_back(hires_ode_step(problem, out.back(), h, scales));
  return out;
}

double continuous_lyapunov(const Vector& x, const Vector& y, const PrimalDualPair& saddle,
                           double tau, double sigma, const Matrix& coupling) {
  return lyapunov_fixed(x, y, saddle, tau, sigma, coupling);
}

DiscreteContinuousGap discrete_continuous_gap(const SaddleProblem& problem,
                                              const PrimalDualPair& init, double s,
                                              double tau_over_s, double horizon,
                                              int reference_refinement) {
  if (reference_refinement < 1) {
    throw std::invalid_argument("discrete_continuous_gap: refinement must be >= 1");
  }
  const OdeScales scales{s, tau_over_s * s, s / tau_over_s};
  const StepParams step{scales.tau, scales.sigma, 1.0};
  const long iterations = static_cast<long>(std::floor(horizon / s + 1e-9));
  const double h = s / reference_refinement;

  Vector x = init.x;
  Vector y = init.y;
  OdeState ode{init.x, init.y, 0.0};
  double sup = 0.0;
  for (long k = 1; k <= iterations; ++k) {
    StepOutput out = pdhg_step(problem, x, y, x, step);
    x = std::move(out.x_next);
    y = std::move(out.y_next);
    for (int i = 0; i < reference_refinement; ++i) ode = hires_ode_step(problem, ode, h, scales);
    const double dist =
        std::sqrt((x - ode.x).squaredNorm() + (y - ode.y).squaredNorm());
    sup = std::max(sup, dist);
  }
  return {s, sup, iterations};
}

}  // namespace pdhg
