#include "pdhg/prox.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include <Eigen/Eigenvalues>

namespace pdhg {

Vector soft_threshold(const Vector& v, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("soft_threshold: t must be >= 0");
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]) - t;
    out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
  return out;
}

Vector project_linf_ball(const Vector& w, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("project_linf_ball: r must be >= 0");
  return w.cwiseMax(-r).cwiseMin(r);
}

Vector prox_shifted_quadratic(const Vector& a, double m, const Vector& v, double t) {
  if (!(m > 0.0) || !(t > 0.0)) {
    throw std::invalid_argument("prox_shifted_quadratic: m and t must be positive");
  }
  return (v + (t * m) * a) / (1.0 + t * m);
}

QuadraticProxCache::QuadraticProxCache(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != b_.size()) {
    throw std::invalid_argument("QuadraticProxCache: A has " + std::to_string(a_.rows()) +
                                " rows but b has " + std::to_string(b_.size()) + " entries");
  }
  const Matrix gram = a_.transpose() * a_;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("QuadraticProxCache: eigen-decomposition of A^T A failed");
  }
  eigvecs_ = eig.eigenvectors();
  eigvals_ = eig.eigenvalues().cwiseMax(0.0);
  atb_ = a_.transpose() * b_;
}

double QuadraticProxCache::strong_convexity() const {
  if (eigvals_.size() == 0) return 0.0;
  const double top = eigvals_[eigvals_.size() - 1];
  const double bottom = eigvals_[0];
  return bottom > 1e-12 * top ? bottom : 0.0;
}

Vector prox_least_squares(const QuadraticProxCache& cache, const Vector& v, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("prox_least_squares: t must be positive");
  const Matrix& basis = cache.eigenvectors();
  Vector coeffs = basis.transpose() * (v + t * cache.atb());
  coeffs.array() /= (1.0 + t * cache.eigenvalues().array());
  return basis * coeffs;
}

double l1_subdiff_distance(const Vector& x, double lambda, const Vector& offset) {
  double sq = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double d;
    if (x[i] > 0.0) {
      d = lambda + offset[i];
    } else if (x[i] < 0.0) {
      d = -lambda + offset[i];
    } else {
      d = std::max(0.0, std::abs(offset[i]) - lambda);
    }
    sq += d * d;
  }
  return std::sqrt(sq);
}

double linf_ball_normal_distance(const Vector& y, double r, const Vector& offset) {
  double sq = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double yi = y[i];
    double d;
    if (std::abs(yi) > r) {
      return std::numeric_limits<double>::infinity();
    } else if (yi == r && r > 0.0) {
      d = std::max(0.0, offset[i]);  // cone [0, inf)
    } else if (yi == -r && r > 0.0) {
      d = std::max(0.0, -offset[i]);  // cone (-inf, 0]
    } else if (r == 0.0) {
      d = 0.0;  // the ball is {0}; the cone is the whole line
    } else {
      d = offset[i];
    }
    sq += d * d;
  }
  return std::sqrt(sq);
}

}  // namespace pdhg
