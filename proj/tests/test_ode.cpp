#include <doctest.h>

#include <cmath>

#include "pdhg/ode.hpp"
#include "pdhg/zoo.hpp"

using namespace pdhg;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

QuadPair two_d_instance() {
  Matrix f(2, 2);
  f << 0.8, 0.3, -0.2, 0.6;
  return make_quad_pair(vec({1.0, -0.5}), vec({0.4, 0.2}), 1.0, 0.8, f);
}

}  // namespace

TEST_CASE("equilibrium is preserved") {
  const QuadPair qp = two_d_instance();
  const OdeState eq{qp.saddle.x, qp.saddle.y, 0.0};
  const OdeScales sc{0.5, 0.5, 0.5};
  const OdeState next = hires_ode_step(qp.problem, eq, 0.1, sc);
  CHECK((next.x - eq.x).norm() <= 1e-10);
  CHECK((next.y - eq.y).norm() <= 1e-10);
  const auto traj = integrate(qp.problem, eq, 1.0, 0.1, sc);
  for (const auto& st : traj) CHECK((st.x - eq.x).norm() + (st.y - eq.y).norm() <= 1e-9);
}

TEST_CASE("decoupled scalar case matches the implicit-Euler recurrence") {
  // f = X^2/2, g* = Y^2/2, F = 0: (s/tau) X' = -X, so X_new = X / (1 + h tau / s).
  const QuadPair qp = make_quad_pair(vec({0}), vec({0}), 1.0, 1.0, Matrix::Zero(1, 1));
  const double s = 0.4, h = 0.05;
  for (double tau : {s, 1.0}) {
    const OdeScales sc{s, tau, s * s / tau};
    const OdeState out = hires_ode_step(qp.problem, {vec({2.0}), vec({-1.0}), 0.0}, h, sc);
    CHECK(out.x[0] == doctest::Approx(2.0 / (1.0 + h * tau / s)).epsilon(1e-9));
    CHECK(out.y[0] == doctest::Approx(-1.0 / (1.0 + h * sc.sigma / s)).epsilon(1e-9));
    CHECK(out.t == doctest::Approx(h));
  }
}

TEST_CASE("h = 0 is the identity") {
  const QuadPair qp = two_d_instance();
  const OdeState st{vec({3, 1}), vec({-2, 0.5}), 1.5};
  const OdeState out = hires_ode_step(qp.problem, st, 0.0, {0.5, 0.5, 0.5});
  CHECK(out.x == st.x);
  CHECK(out.y == st.y);
  CHECK(out.t == st.t);
}

TEST_CASE("integrate step counts") {
  const QuadPair qp = two_d_instance();
  const OdeState st{vec({3, 1}), vec({-2, 0.5}), 0.0};
  CHECK(integrate(qp.problem, st, 0.25, 0.25, {0.5, 0.5, 0.5}).size() == 2);
  CHECK(integrate(qp.problem, st, 1.0, 0.1, {0.5, 0.5, 0.5}).size() == 11);
}

TEST_CASE("long-horizon integration approaches the saddle") {
  const QuadPair qp = two_d_instance();
  const double s = 0.9 / operator_norm(qp.problem.coupling());
  const auto traj = integrate(qp.problem, {vec({0, 0}), vec({0, 0}), 0.0}, 10.0, 1e-3, {s, s, s});
  const OdeState& end = traj.back();
  CHECK(end.t == doctest::Approx(10.0));
  CHECK(std::sqrt((end.x - qp.saddle.x).squaredNorm() + (end.y - qp.saddle.y).squaredNorm()) <=
        1e-3);
}

TEST_CASE("continuous Lyapunov function decreases along trajectories") {
  const QuadPair qp = two_d_instance();
  const Matrix& f = qp.problem.coupling();
  CHECK(continuous_lyapunov(qp.saddle.x, qp.saddle.y, qp.saddle, 0.5, 0.5, f) == 0.0);
  const PrimalDualPair zero{vec({0}), vec({0})};
  CHECK(continuous_lyapunov(vec({1}), vec({1}), zero, 1.0, 1.0, Matrix::Constant(1, 1, 0.5)) ==
        doctest::Approx(0.5));

  const double s = 0.9 / operator_norm(f);
  for (double tau_over_s : {1.0, 0.3, 2.5}) {
    const OdeScales sc{s, tau_over_s * s, s / tau_over_s};
    const auto traj = integrate(qp.problem, {vec({3, -1}), vec({2, 2}), 0.0}, 5.0, 0.01, sc);
    for (size_t i = 1; i < traj.size(); ++i) {
      const double e0 = continuous_lyapunov(traj[i - 1].x, traj[i - 1].y, qp.saddle, sc.tau, sc.sigma, f);
      const double e1 = continuous_lyapunov(traj[i].x, traj[i].y, qp.saddle, sc.tau, sc.sigma, f);
      if (!(e1 <= e0 + 1e-8)) FAIL("E(t) increased at step " << i);
    }
  }
}

TEST_CASE("PDHG with theta = 1 is implicit Euler with h = s") {
  const QuadPair qp = two_d_instance();
  const double s = 0.6 / operator_norm(qp.problem.coupling());
  const OdeScales sc{s, s, s};
  const OdeState ode = hires_ode_step(qp.problem, {vec({1, 2}), vec({-1, 0.5}), 0.0}, s, sc);
  const DiscreteContinuousGap one = discrete_continuous_gap(qp.problem, {vec({1, 2}), vec({-1, 0.5})}, s, 1.0, s, 1);
  CHECK(one.iterations == 1);
  CHECK(one.sup_distance <= 1e-9);
  (void)ode;
}

TEST_CASE("discrete iterates approach the ODE as s halves") {
  const QuadPair qp = two_d_instance();
  const double nf = operator_norm(qp.problem.coupling());
  double prev = -1.0;
  for (double scale : {0.1, 0.05, 0.025}) {
    const DiscreteContinuousGap g =
        discrete_continuous_gap(qp.problem, {vec({2, -1}), vec({1, 1})}, scale / nf, 1.0, 10.0);
    if (prev > 0) CHECK(g.sup_distance / prev <= 0.7);
    prev = g.sup_distance;
  }
}

TEST_CASE("ODE errors") {
  const QuadPair qp = two_d_instance();
  const OdeState st{vec({1, 1}), vec({1, 1}), 0.0};
  // tau sigma != s^2 with s ||F|| large makes M singular: (s/tau)(s/sigma) = s^2 ||F||^2.
  const double nf = operator_norm(qp.problem.coupling());
  CHECK_THROWS_AS(hires_ode_step(qp.problem, st, 0.1, {1.0, 1.0 / nf, 1.0 / nf}), OdeError);
  ProblemOracles o;
  o.prox_f = [](const Vector& v, double) { return v; };
  o.prox_gstar = [](const Vector& w, double) { return w; };
  const SaddleProblem no_grad(Matrix::Identity(2, 2), o, 0.0, 0.0);
  CHECK_THROWS_AS(hires_ode_step(no_grad, st, 0.1, {0.5, 0.5, 0.5}), MissingOracleError);
  CHECK_THROWS_AS(hires_ode_step(qp.problem, st, -0.1, {0.5, 0.5, 0.5}), std::invalid_argument);
}
