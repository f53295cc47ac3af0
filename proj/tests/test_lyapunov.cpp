#include <doctest.h>

#include <cmath>
#include <random>

#include "pdhg/lyapunov.hpp"
#include "pdhg/zoo.hpp"

using namespace pdhg;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Matrix mat1(double a) { return Matrix::Constant(1, 1, a); }

PrimalDualPair origin(Eigen::Index d1, Eigen::Index d2) {
  return {Vector::Zero(d1), Vector::Zero(d2)};
}

Vector random_vector(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = n(rng);
  return v;
}

// F with ||F|| = target exactly (rescaled Gaussian matrix).
Matrix random_coupling(Eigen::Index rows, Eigen::Index cols, double target, std::mt19937_64& rng) {
  Matrix f(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) f.col(j) = random_vector(rows, rng);
  return f * (target / operator_norm(f));
}

Schedule schedule_for(Regime r, const SaddleProblem& p, std::optional<double> c = std::nullopt) {
  ScheduleParams sp;
  sp.mu = p.mu();
  sp.gamma = p.gamma();
  sp.c = c;
  return make_schedule(r, sp, operator_norm(p.coupling()));
}

}  // namespace

TEST_CASE("lyapunov_fixed examples") {
  const PrimalDualPair z = origin(1, 1);
  CHECK(lyapunov_fixed(vec({1}), vec({1}), z, 1.0, 1.0, mat1(0.5)) == doctest::Approx(0.5));
  CHECK(lyapunov_fixed(vec({0}), vec({0}), z, 1.0, 1.0, mat1(0.5)) == 0.0);
  CHECK(lyapunov_fixed(vec({1}), vec({0}), z, 2.0, 1.0, mat1(0.5)) == doctest::Approx(0.25));
}

TEST_CASE("lyapunov_varying examples") {
  ScheduleParams p;
  p.mu = 1.0;
  p.c = 1.0;
  p.s = 0.5;
  const Schedule s = make_schedule(Regime::varying_sc, p, 1.0);
  const PrimalDualPair z = origin(1, 1);
  CHECK(lyapunov_varying(vec({1}), vec({1}), z, s.at(0).tau, s.at(0).sigma, mat1(1.0)) ==
        doctest::Approx(1.5));
  CHECK(lyapunov_varying(vec({0}), vec({0}), z, 1.0, 0.25, mat1(1.0)) == 0.0);
  CHECK(lyapunov_varying(vec({1}), vec({1}), z, 1.0, 1.0, mat1(0.0)) == doctest::Approx(1.0));
}

TEST_CASE("lyapunov_accelerated examples") {
  const PrimalDualPair z = origin(1, 1);
  // x_k = x_{k-1}, y_{k-1} = y*: only the first term remains.
  CHECK(lyapunov_accelerated(vec({2}), vec({2}), vec({0}), z, 0.5, 0.7, 0.3, mat1(1.0)) ==
        doctest::Approx(4.0 / (2 * 0.25)));
  // 1/tau_0 = 0 at k = 1.
  CHECK(lyapunov_accelerated(vec({1}), vec({5}), vec({1}), z, 0.5, std::nullopt, 0.5, mat1(1.0)) ==
        doctest::Approx(1.0 / (2 * 0.25) + 1.0 / (2 * 0.25)));
  CHECK(lyapunov_accelerated(vec({1}), vec({0}), vec({1}), z, 1.0, 1.0, 0.5, mat1(0.5)) ==
        doctest::Approx(3.5));
}

TEST_CASE("numerical_error examples") {
  CHECK(numerical_error(vec({1}), vec({1}), 1.0, 1.0, mat1(0.5)) == doctest::Approx(0.5));
  CHECK(numerical_error(vec({0}), vec({2}), 1.0, 0.5, mat1(0.5)) == doctest::Approx(4.0));
  CHECK(numerical_error(vec({3}), vec({0}), 1.5, 0.5, mat1(0.5)) == doctest::Approx(3.0));
  // Boundary s||F|| = 1: equality case of Cauchy-Schwarz.
  CHECK(numerical_error(vec({1}), vec({1}), 1.0, 1.0, mat1(1.0)) == doctest::Approx(0.0));
  CHECK(numerical_error_accelerated(vec({1}), vec({1}), 1.0, 0.5, mat1(0.5)) ==
        doctest::Approx(0.5 - 0.5 + 2.0));
  CHECK(numerical_error_accelerated(vec({1}), vec({1}), std::nullopt, 0.5, mat1(0.5)) ==
        doctest::Approx(2.0));
}

TEST_CASE("Lyapunov forms and NE are nonnegative under admissibility") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (Eigen::Index d : {1, 2, 5, 20}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const double f_norm = 0.2 + 3.0 * u(rng);
      const Matrix f = random_coupling(d, d, f_norm, rng);
      const double s = u(rng) / f_norm;
      const double tau = s * std::exp(4.0 * (u(rng) - 0.5));
      const double sigma = s * s / tau;
      const PrimalDualPair z{random_vector(d, rng), random_vector(d, rng)};
      const Vector x = random_vector(d, rng), y = random_vector(d, rng);
      const double e = lyapunov_fixed(x, y, z, tau, sigma, f);
      const double lower = 0.5 * (1.0 - s * f_norm) *
                           ((x - z.x).squaredNorm() / tau + (y - z.y).squaredNorm() / sigma);
      CHECK(e >= lower - 1e-12 * (1.0 + std::abs(e)));
      CHECK(numerical_error(x, y, tau, sigma, f) >= -1e-12);

      // Accelerated: tau_{k+1} sigma_k = s^2 with tau_k = 1/(ck).
      const double c = 0.1 + u(rng);
      const long k = 1 + static_cast<long>(50 * u(rng));
      const double tau_k = 1.0 / (c * k), tau_prev = 1.0 / (c * (k - 1 > 0 ? k - 1 : 1));
      const Vector xp = random_vector(d, rng), yp = random_vector(d, rng);
      const double ea = lyapunov_accelerated(x, xp, yp, z, tau_k, k > 1 ? std::optional(tau_prev) : std::nullopt, s, f);
      CHECK(ea >= (x - z.x).squaredNorm() / (2 * tau_k * tau_k) - 1e-9 * (1.0 + std::abs(ea)));
      CHECK(numerical_error_accelerated(xp, yp, tau_prev, s, f) >= -1e-12 * (1.0 + xp.squaredNorm() / (tau_prev * tau_prev)));
    }
  }
}

TEST_CASE("alpha, rho and factorial-ratio examples") {
  CHECK(varying_rate_alpha(1.0, 0.5, 0.5, 1.0) == doctest::Approx(0.8));
  CHECK(linear_rate_rho(0.5, 1.0, 1.0, 1.0) == doctest::Approx(0.6));
  CHECK(varying_energy_bound(8, 1.0, 1.0) == doctest::Approx(0.2).epsilon(1e-12));

  TheoremConstants tc;
  tc.mu = 1.0;
  tc.c = 0.5;
  tc.s = 0.5;
  tc.f_norm = 1.0;
  tc.energy_start = 3.0;
  const double alpha = 0.8;
  const double at0 = *theorem_bound(Regime::varying_sc, 0, tc);
  CHECK(at0 == doctest::Approx((1 + alpha) * std::tgamma(2.0) / std::tgamma(2.0 + alpha) * 3.0)
                   .epsilon(1e-12));
  double prev = at0;
  for (long k = 1; k < 5000; ++k) {
    const double b = *theorem_bound(Regime::varying_sc, k, tc);
    if (!(b <= prev)) FAIL("bound increases at k = " << k);
    prev = b;
  }
  // Log-domain evaluation stays finite far past 170!.
  CHECK(std::isfinite(*theorem_bound(Regime::varying_sc, 100000, tc)));
}

TEST_CASE("theorem_bound per regime and missing constants") {
  TheoremConstants tc;
  CHECK_FALSE(theorem_bound(Regime::fixed, 3, tc).has_value());
  try {
    theorem_bound(Regime::optimal_ss, 3, tc);
    FAIL("expected a missing-constant error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("missing constant") != std::string::npos);
  }
  tc.s = 0.5;
  tc.f_norm = 1.0;
  tc.mu = 1.0;
  tc.gamma = 1.0;
  tc.energy_start = 2.0;
  CHECK(*theorem_bound(Regime::optimal_ss, 3, tc) == doctest::Approx(2.0 * 0.216));
  tc.c = 0.5;
  tc.k0 = 3;
  CHECK_FALSE(theorem_bound(Regime::accelerated, 2, tc).has_value());
  CHECK(*theorem_bound(Regime::accelerated, 4, tc) == doctest::Approx(2 * 2.0 / (0.25 * 16)));
}

TEST_CASE("check_lemma example on a quad pair under optimal_ss") {
  InstanceSpec spec;
  spec.seed = 12;
  spec.d1 = 5;
  spec.d2 = 3;
  const Instance inst = build_instance(spec);
  const Schedule s = schedule_for(Regime::optimal_ss, inst.problem);
  const Trajectory t = run(inst.problem, s, origin(5, 3), {500, 0.0, 1});
  const LemmaReport rep = check_lemma(Regime::optimal_ss, t, inst.problem, *inst.exact_saddle);
  CHECK(rep.valid);
  CHECK(rep.kind == LemmaKind::doubly_strong);
  CHECK(rep.records.size() == t.records.size());
  for (const auto& r : rep.records) CHECK(r.lemma_slack >= -lemma_tolerance(r.energy));
}

TEST_CASE("check_lemma at the saddle has zero energy and slack") {
  InstanceSpec spec;
  spec.seed = 3;
  const Instance inst = build_instance(spec);
  const Schedule s = schedule_for(Regime::varying_sc, inst.problem);
  const Trajectory t = run(inst.problem, s, *inst.exact_saddle, {20, -1.0, 1});
  const LemmaReport rep = check_lemma(Regime::varying_sc, t, inst.problem, *inst.exact_saddle);
  REQUIRE(rep.records.size() == 20);
  for (const auto& r : rep.records) {
    CHECK(std::abs(r.energy) <= 1e-20);
    CHECK(std::abs(r.lemma_slack) <= 1e-20);
  }
}

TEST_CASE("check_lemma refusals") {
  InstanceSpec spec;
  spec.seed = 3;
  const Instance inst = build_instance(spec);
  const Schedule s = schedule_for(Regime::varying_sc, inst.problem);
  const Trajectory t = run(inst.problem, s, origin(4, 4), {5, 0.0, 1});
  CHECK_THROWS_AS(check_lemma(Regime::optimal_ss, t, inst.problem, *inst.exact_saddle),
                  LemmaCheckError);

  // Same instance with F scaled so that s ||F|| = 1.5 for the schedule's s.
  QuadPairData data = *inst.quad;
  data.coupling *= 1.5 / (s.s() * operator_norm(data.coupling));
  const QuadPair scaled = make_quad_pair(data.shift_x, data.shift_y, data.mu, data.gamma, data.coupling);
  CHECK_THROWS_AS(check_lemma(Regime::varying_sc, t, scaled.problem, scaled.saddle), LemmaCheckError);

  // Merely convex Lasso under fixed steps has no lemma.
  InstanceSpec wide;
  wide.kind = InstanceKind::lasso;
  wide.d1 = 6;
  wide.m = 3;
  const Instance lasso = build_instance(wide);
  REQUIRE(lasso.problem.mu() == 0.0);
  const Schedule fs = schedule_for(Regime::fixed, lasso.problem);
  const Trajectory ft = run(lasso.problem, fs, origin(6, 6), {5, 0.0, 1});
  CHECK_FALSE(lemma_for(Regime::fixed, lasso.problem).has_value());
  CHECK_THROWS_AS(check_lemma(Regime::fixed, ft, lasso.problem, origin(6, 6)), LemmaCheckError);
}

TEST_CASE("lemmas hold on zoo problems across regimes and seeds") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    InstanceSpec q;
    q.seed = seed;
    q.d1 = 4;
    q.d2 = 3;
    q.mu = 0.5 + 0.1 * static_cast<double>(seed);
    q.gamma = 0.3;
    const Instance quad = build_instance(q);
    InstanceSpec l;
    l.kind = InstanceKind::lasso;
    l.seed = seed;
    l.d1 = 5;
    l.m = 9;
    l.lambda = 0.3;
    const Instance lasso = build_instance(l);
    const PrimalDualPair lasso_ref = reference_saddle(lasso.problem).saddle;

    for (Regime r : {Regime::fixed, Regime::varying_sc, Regime::accelerated, Regime::optimal_ss}) {
      for (int which = 0; which < 2; ++which) {
        const Instance& inst = which == 0 ? quad : lasso;
        const PrimalDualPair& z = which == 0 ? *quad.exact_saddle : lasso_ref;
        if (!lemma_for(r, inst.problem)) continue;
        const Schedule s = schedule_for(r, inst.problem);
        const Trajectory t = run(inst.problem, s,
                                 origin(inst.problem.primal_dim(), inst.problem.dual_dim()),
                                 {1000, -1.0, 1});
        const LemmaReport rep = check_lemma(r, t, inst.problem, z);
        CAPTURE(seed);
        CAPTURE(to_string(r));
        CAPTURE(which);
        CHECK(rep.valid);
        // Monotone decay wherever the lemma's coefficients are nonnegative.
        for (const auto& rec : rep.records) {
          if (rec.descent_coefficient >= 0.0 && rec.energy_next > rec.energy + lemma_tolerance(rec.energy)) {
            FAIL("energy increased at k = " << rec.k);
          }
        }
      }
    }
  }
}
