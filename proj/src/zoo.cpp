#include "pdhg/zoo.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/LU>
#include <Eigen/QR>

namespace pdhg {

SaddleProblem make_generalized_lasso(const Matrix& a, const Vector& b, double lambda,
                                     const Matrix& coupling) {
  if (!(lambda > 0.0)) throw std::invalid_argument("generalized lasso: lambda must be positive");
  if (a.rows() != b.size()) {
    throw std::invalid_argument("generalized lasso: A has " + std::to_string(a.rows()) +
                                " rows but b has " + std::to_string(b.size()) + " entries");
  }
  if (coupling.cols() != a.cols()) {
    throw std::invalid_argument("generalized lasso: F has " + std::to_string(coupling.cols()) +
                                " columns but A has " + std::to_string(a.cols()));
  }
  auto cache = std::make_shared<const QuadraticProxCache>(a, b);
  ProblemOracles oracles;
  oracles.prox_f = [cache](const Vector& v, double t) { return prox_least_squares(*cache, v, t); };
  oracles.prox_gstar = [lambda](const Vector& w, double) { return project_linf_ball(w, lambda); };
  oracles.grad_f = [cache](const Vector& x) { return cache->gradient(x); };
  oracles.subdiff_f = [cache](const Vector& x, const Vector& offset) {
    return (cache->gradient(x) + offset).norm();
  };
  oracles.subdiff_gstar = [lambda](const Vector& y, const Vector& offset) {
    return linf_ball_normal_distance(y, lambda, offset);
  };
  oracles.primal_objective = [cache, lambda, coupling](const Vector& x) {
    return cache->value(x) + lambda * (coupling * x).lpNorm<1>();
  };
  const double mu = cache->strong_convexity();
  return SaddleProblem(coupling, std::move(oracles), mu, 0.0);
}

SaddleProblem make_lasso(const Matrix& a, const Vector& b, double lambda) {
  return make_generalized_lasso(a, b, lambda, Matrix::Identity(a.cols(), a.cols()));
}

Matrix difference_matrix(Eigen::Index d) {
  if (d < 2) throw std::invalid_argument("difference_matrix: d must be >= 2");
  Matrix f = Matrix::Zero(d - 1, d);
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    f(i, i) = -1.0;
    f(i, i + 1) = 1.0;
  }
  return f;
}

PrimalDualPair kkt_oracle(const QuadPairData& data) {
  const Eigen::Index d1 = data.coupling.cols();
  const Eigen::Index d2 = data.coupling.rows();
  Matrix kkt(d1 + d2, d1 + d2);
  kkt.topLeftCorner(d1, d1) = data.mu * Matrix::Identity(d1, d1);
  kkt.topRightCorner(d1, d2) = data.coupling.transpose();
  kkt.bottomLeftCorner(d2, d1) = -data.coupling;
  kkt.bottomRightCorner(d2, d2) = data.gamma * Matrix::Identity(d2, d2);
  Vector rhs(d1 + d2);
  rhs << data.mu * data.shift_x, data.gamma * data.shift_y;
  const Vector z = kkt.fullPivLu().solve(rhs);
  return {z.head(d1), z.tail(d2)};
}

QuadPair make_quad_pair(const Vector& shift_x, const Vector& shift_y, double mu, double gamma,
                        const Matrix& coupling) {
  if (!(mu > 0.0) || !(gamma > 0.0)) {
    throw std::invalid_argument("make_quad_pair: mu and gamma must be positive");
  }
  if (coupling.cols() != shift_x.size() || coupling.rows() != shift_y.size()) {
    throw std::invalid_argument("make_quad_pair: F must be dim(b_hat) x dim(a)");
  }
  ProblemOracles oracles;
  oracles.prox_f = [shift_x, mu](const Vector& v, double t) {
    return prox_shifted_quadratic(shift_x, mu, v, t);
  };
  oracles.prox_gstar = [shift_y, gamma](const Vector& w, double t) {
    return prox_shifted_quadratic(shift_y, gamma, w, t);
  };
  oracles.grad_f = [shift_x, mu](const Vector& x) -> Vector { return mu * (x - shift_x); };
  oracles.grad_gstar = [shift_y, gamma](const Vector& y) -> Vector {
    return gamma * (y - shift_y);
  };
  oracles.subdiff_f = [shift_x, mu](const Vector& x, const Vector& offset) {
    return (mu * (x - shift_x) + offset).norm();
  };
  oracles.subdiff_gstar = [shift_y, gamma](const Vector& y, const Vector& offset) {
    return (gamma * (y - shift_y) + offset).norm();
  };
  // g(z) = <z, b_hat> + ||z||^2 / (2 gamma), the conjugate of g*.
  oracles.primal_objective = [shift_x, shift_y, mu, gamma, coupling](const Vector& x) {
    const Vector z = coupling * x;
    return 0.5 * mu * (x - shift_x).squaredNorm() + z.dot(shift_y) +
           z.squaredNorm() / (2.0 * gamma);
  };
  QuadPairData data{shift_x, shift_y, mu, gamma, coupling};
  return {SaddleProblem(coupling, std::move(oracles), mu, gamma), kkt_oracle(data)};
}

SaddleCertificate certify_saddle(const SaddleProblem& problem, const PrimalDualPair& candidate,
                                 double tol) {
  const Matrix& coupling = problem.coupling();
  const double r_x =
      problem.subdiff_f_distance(candidate.x, coupling.transpose() * candidate.y);
  const double r_y = problem.subdiff_gstar_distance(candidate.y, -(coupling * candidate.x));
  return {r_x <= tol && r_y <= tol, r_x, r_y};
}

ReferenceSolution reference_saddle(const SaddleProblem& problem, double tol, long budget,
                                   double certify_tol) {
  const double f_norm = operator_norm(problem.coupling());
  const Schedule sched = make_schedule(Regime::fixed, {}, f_norm);
  const PrimalDualPair start{Vector::Zero(problem.primal_dim()), Vector::Zero(problem.dual_dim())};
  const Trajectory traj = run(problem, sched, start, {budget, tol, budget});
  const PrimalDualPair final = traj.final_pair();
  return {final, certify_saddle(problem, final, certify_tol), traj.steps};
}

std::string_view to_string(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::lasso:
      return "lasso";
    case InstanceKind::gen_lasso:
      return "gen_lasso";
    case InstanceKind::quad_pair:
      return "quad_pair";
  }
  return "unknown";
}

InstanceKind instance_kind_from_string(std::string_view name) {
  for (InstanceKind k : {InstanceKind::lasso, InstanceKind::gen_lasso, InstanceKind::quad_pair}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown instance kind '" + std::string(name) +
                              "' (expected lasso, gen_lasso or quad_pair)");
}

namespace {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

Vector gaussian_vector(Eigen::Index n, std::mt19937_64& rng) {
  return gaussian_matrix(n, 1, rng).col(0);
}

Matrix orthonormal_columns(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  const Matrix g = gaussian_matrix(rows, cols, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

// Geometric grid from `low` to `low * condition`, descending.
Vector geometric_spectrum(Eigen::Index n, double low, double condition) {
  Vector sv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double frac = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    sv[i] = low * std::pow(condition, 1.0 - frac);
  }
  return sv;
}

}  // namespace

Matrix random_matrix_with_singular_values(Eigen::Index m, Eigen::Index d, const Vector& sv,
                                          std::uint64_t seed) {
  const Eigen::Index r = sv.size();
  if (r > std::min(m, d)) {
    throw std::invalid_argument("random_matrix_with_singular_values: too many singular values");
  }
  std::mt19937_64 rng(seed);
  const Matrix u = orthonormal_columns(m, r, rng);
  const Matrix v = orthonormal_columns(d, r, rng);
  return u * sv.asDiagonal() * v.transpose();
}

Instance build_instance(const InstanceSpec& spec) {
  if (spec.d1 < 1) throw std::invalid_argument("instance: d1 must be >= 1");
  // Distinct streams for the matrix factors and the data vectors.
  std::mt19937_64 rng(spec.seed * 0x9E3779B97F4A7C15ULL + 17);
  switch (spec.kind) {
    case InstanceKind::lasso: {
      if (spec.m < 1) throw std::invalid_argument("instance: m must be >= 1");
      const Eigen::Index rank = std::min(spec.m, spec.d1);
      const Vector sv = geometric_spectrum(rank, spec.a_min_singular, spec.a_condition);
      Matrix a = random_matrix_with_singular_values(spec.m, spec.d1, sv, spec.seed);
      Vector truth = Vector::Zero(spec.d1);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      std::normal_distribution<double> normal(0.0, 1.0);
      for (Eigen::Index i = 0; i < spec.d1; ++i) {
        if (unif(rng) < 0.4) truth[i] = 2.0 * normal(rng);
      }
      Vector b = a * truth + 0.1 * gaussian_vector(spec.m, rng);
      SaddleProblem problem = make_lasso(a, b, spec.lambda);
      return {spec, std::move(problem), std::nullopt, std::move(a), std::move(b), std::nullopt};
    }
    case InstanceKind::gen_lasso: {
      if (spec.d1 < 2) throw std::invalid_argument("instance: gen_lasso needs d1 >= 2");
      // Piecewise-constant signal with four pieces plus noise; A = I (TV denoising).
      Vector b(spec.d1);
      std::normal_distribution<double> normal(0.0, 1.0);
      double level = 0.0;
      for (Eigen::Index i = 0; i < spec.d1; ++i) {
        if (i % std::max<Eigen::Index>(1, spec.d1 / 4) == 0) level = 2.0 * normal(rng);
        b[i] = level;
      }
      b += 0.1 * gaussian_vector(spec.d1, rng);
      Matrix a = Matrix::Identity(spec.d1, spec.d1);
      SaddleProblem problem =
          make_generalized_lasso(a, b, spec.lambda, difference_matrix(spec.d1));
      return {spec, std::move(problem), std::nullopt, std::move(a), std::move(b), std::nullopt};
    }
    case InstanceKind::quad_pair: {
      if (spec.d2 < 1) throw std::invalid_argument("instance: d2 must be >= 1");
      const Eigen::Index rank = std::min(spec.d1, spec.d2);
      Vector sv = geometric_spectrum(rank, spec.f_scale / 5.0, 5.0);
      const Matrix f = random_matrix_with_singular_values(spec.d2, spec.d1, sv, spec.seed);
      const Vector shift_x = gaussian_vector(spec.d1, rng);
      const Vector shift_y = gaussian_vector(spec.d2, rng);
      QuadPair qp = make_quad_pair(shift_x, shift_y, spec.mu, spec.gamma, f);
      QuadPairData data{shift_x, shift_y, spec.mu, spec.gamma, f};
      return {spec, std::move(qp.problem), std::move(qp.saddle), Matrix(), Vector(), data};
    }
  }
  throw std::logic_error("build_instance: unreachable");
}

}  // namespace pdhg
