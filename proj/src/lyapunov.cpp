#include "pdhg/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pdhg {

double lyapunov_fixed(const Vector& x, const Vector& y, const PrimalDualPair& saddle, double tau,
                      double sigma, const Matrix& coupling) {
  const Vector dx = x - saddle.x;
  const Vector dy = y - saddle.y;
  return dx.squaredNorm() / (2.0 * tau) + dy.squaredNorm() / (2.0 * sigma) -
         (coupling * dx).dot(dy);
}

double lyapunov_varying(const Vector& x, const Vector& y, const PrimalDualPair& saddle,
                        double tau_k, double sigma_k, const Matrix& coupling) {
  return lyapunov_fixed(x, y, saddle, tau_k, sigma_k, coupling);
}

double lyapunov_accelerated(const Vector& x_k, const Vector& x_prev, const Vector& y_prev,
                            const PrimalDualPair& saddle, double tau_k,
                            std::optional<double> tau_prev, double s, const Matrix& coupling) {
  const Vector dx = x_k - saddle.x;
  const Vector dy = y_prev - saddle.y;
  double e = dx.squaredNorm() / (2.0 * tau_k * tau_k) + dy.squaredNorm() / (2.0 * s * s);
  if (tau_prev) {
    const Vector step = x_k - x_prev;
    e += (coupling * step).dot(dy) / *tau_prev +
         step.squaredNorm() / (2.0 * *tau_prev * *tau_prev);
  }
  return e;
}

double numerical_error(const Vector& dx, const Vector& dy, double tau, double sigma,
                       const Matrix& coupling) {
  return dx.squaredNorm() / (2.0 * tau) + dy.squaredNorm() / (2.0 * sigma) -
         (coupling * dx).dot(dy);
}

double numerical_error_accelerated(const Vector& dx, const Vector& dy,
                                   std::optional<double> tau_prev, double s,
                                   const Matrix& coupling) {
  double ne = dy.squaredNorm() / (2.0 * s * s);
  if (tau_prev) {
    ne += dx.squaredNorm() / (2.0 * *tau_prev * *tau_prev) - (coupling * dx).dot(dy) / *tau_prev;
  }
  return ne;
}

std::string_view to_string(LemmaKind kind) {
  switch (kind) {
    case LemmaKind::primal_strong:
      return "primal_strong";
    case LemmaKind::accelerated:
      return "accelerated";
    case LemmaKind::doubly_strong:
      return "doubly_strong";
  }
  return "unknown";
}

std::optional<LemmaKind> lemma_for(Regime regime, const SaddleProblem& problem) {
  switch (regime) {
    case Regime::varying_sc:
      if (problem.mu() > 0.0) return LemmaKind::primal_strong;
      return std::nullopt;
    case Regime::accelerated:
      if (problem.mu() > 0.0) return LemmaKind::accelerated;
      return std::nullopt;
    case Regime::optimal_ss:
      if (problem.mu() > 0.0 && problem.gamma() > 0.0) return LemmaKind::doubly_strong;
      return std::nullopt;
    case Regime::fixed:
      if (problem.mu() > 0.0 && problem.gamma() > 0.0) return LemmaKind::doubly_strong;
      if (problem.mu() > 0.0) return LemmaKind::primal_strong;
      return std::nullopt;
  }
  return std::nullopt;
}

double lemma_tolerance(double energy) { return 1e-8 * (1.0 + std::abs(energy)); }

namespace {

// tau_{k-1} for the accelerated energy at iteration k (absent at k = 1).
std::optional<double> previous_tau(const Schedule& schedule, long k) {
  if (k - 1 < schedule.k_start()) return std::nullopt;
  return schedule.at(k - 1).tau;
}

}  // namespace

double energy_at(const StepRecord& record, const Schedule& schedule, const PrimalDualPair& saddle,
                 const Matrix& coupling) {
  if (schedule.regime() == Regime::accelerated) {
    return lyapunov_accelerated(record.x, record.x_prev, record.y_prev, saddle, record.step.tau,
                                previous_tau(schedule, record.k), schedule.s(), coupling);
  }
  return lyapunov_varying(record.x, record.y, saddle, record.step.tau, record.step.sigma,
                          coupling);
}

double numerical_error_at(const StepRecord& record, const Schedule& schedule,
                          const Matrix& coupling) {
  if (schedule.regime() == Regime::accelerated) {
    return numerical_error_accelerated(record.x - record.x_prev, record.y - record.y_prev,
                                       previous_tau(schedule, record.k), schedule.s(), coupling);
  }
  return numerical_error(record.x_next - record.x, record.y_next - record.y, record.step.tau,
                         record.step.sigma, coupling);
}

LyapunovRecord evaluate_step(LemmaKind kind, const StepRecord& record, const SaddleProblem& problem,
                             const Schedule& schedule, const PrimalDualPair& saddle) {
  const Matrix& coupling = problem.coupling();
  const StepParams now = record.step;
  const StepParams next = schedule.at(record.k + 1);
  const double mu = problem.mu();
  const double dist_x_next = (record.x_next - saddle.x).squaredNorm();
  const double dist_y_next = (record.y_next - saddle.y).squaredNorm();

  LyapunovRecord out;
  out.k = record.k;
  out.energy = energy_at(record, schedule, saddle, coupling);
  if (schedule.regime() == Regime::accelerated) {
    out.energy_next = lyapunov_accelerated(record.x_next, record.x, record.y, saddle, next.tau,
                                           now.tau, schedule.s(), coupling);
  } else {
    out.energy_next =
        lyapunov_varying(record.x_next, record.y_next, saddle, next.tau, next.sigma, coupling);
  }
  out.numerical_error = numerical_error_at(record, schedule, coupling);

  switch (kind) {
    case LemmaKind::primal_strong: {
      out.descent_coefficient = mu + 1.0 / (2.0 * now.tau) - 1.0 / (2.0 * next.tau);
      const double y_coeff = 1.0 / (2.0 * now.sigma) - 1.0 / (2.0 * next.sigma);
      out.lemma_rhs = -out.descent_coefficient * dist_x_next - y_coeff * dist_y_next;
      break;
    }
    case LemmaKind::accelerated: {
      out.descent_coefficient = mu / now.tau + 1.0 / (2.0 * now.tau * now.tau) -
                                1.0 / (2.0 * next.tau * next.tau);
      out.lemma_rhs = -out.descent_coefficient * dist_x_next;
      break;
    }
    case LemmaKind::doubly_strong: {
      out.descent_coefficient = mu;
      out.lemma_rhs = -(mu * dist_x_next + problem.gamma() * dist_y_next);
      break;
    }
  }
  out.lemma_slack = out.lemma_rhs - (out.energy_next - out.energy);
  out.certified = out.lemma_slack >= -lemma_tolerance(out.energy);
  return out;
}

LemmaReport check_lemma(Regime regime, const Trajectory& trajectory, const SaddleProblem& problem,
                        const PrimalDualPair& saddle) {
  const Schedule& schedule = trajectory.schedule;
  if (schedule.regime() != regime) {
    throw LemmaCheckError("check_lemma: trajectory was produced by the " +
                          std::string(to_string(schedule.regime())) + " regime, not " +
                          std::string(to_string(regime)));
  }
  const auto kind = lemma_for(regime, problem);
  if (!kind) {
    throw LemmaCheckError("check_lemma: no descent lemma matches the " +
                          std::string(to_string(regime)) + " regime on this problem (mu = " +
                          std::to_string(problem.mu()) +
                          ", gamma = " + std::to_string(problem.gamma()) + ")");
  }
  const double f_norm = operator_norm(problem.coupling());
  if (!check_admissibility(schedule.s(), f_norm).admissible) {
    throw LemmaCheckError("check_lemma: s * ||F|| = " + std::to_string(schedule.s() * f_norm) +
                          " is not below 1; the descent lemmas do not apply");
  }
  if (saddle.x.size() != problem.primal_dim() || saddle.y.size() != problem.dual_dim()) {
    throw LemmaCheckError("check_lemma: saddle point dimensions do not match the problem");
  }

  LemmaReport report;
  report.kind = *kind;
  report.records.reserve(trajectory.records.size());
  report.worst_normalized_slack = std::numeric_limits<double>::infinity();
  for (const StepRecord& rec : trajectory.records) {
    LyapunovRecord lr = evaluate_step(*kind, rec, problem, schedule, saddle);
    report.valid = report.valid && lr.certified;
    report.worst_normalized_slack =
        std::min(report.worst_normalized_slack, lr.lemma_slack / (1.0 + std::abs(lr.energy)));
    report.records.push_back(lr);
  }
  return report;
}

double varying_rate_alpha(double mu, double c, double s, double f_norm) {
  return std::min((2.0 * mu - c) / (s + c), 1.0 / (1.0 + c * s * f_norm * f_norm));
}

namespace {

// (k+1)! / (k+1+alpha)! = Gamma(k+2) / Gamma(k+2+alpha), in the log domain.
double factorial_ratio(double top, double bottom) {
  return std::exp(std::lgamma(top) - std::lgamma(bottom));
}

}  // namespace

double varying_energy_bound(long k, double alpha, double e0) {
  const double kk = static_cast<double>(k);
  return (1.0 + alpha) * factorial_ratio(kk + 2.0, kk + 2.0 + alpha) * e0;
}

double varying_distance_bound(long k, double alpha, double s, double f_norm, double c,
                              double x0_dist_sq, double y0_dist_sq) {
  const double kk = static_cast<double>(k);
  const double sf = s * f_norm;
  return (1.0 + sf) / (1.0 - sf) * (1.0 + alpha) * factorial_ratio(kk + 1.0, kk + 2.0 + alpha) *
         (x0_dist_sq + y0_dist_sq / (c * c * s * s));
}

double accelerated_distance_bound(long k, double c, double energy_k0) {
  const double kk = static_cast<double>(k);
  return 2.0 * energy_k0 / (c * c * kk * kk);
}

double linear_rate_rho(double s, double f_norm, double mu, double gamma) {
  const double sf = s * f_norm;
  return (1.0 + sf) / (1.0 + sf + 2.0 * s * std::sqrt(mu * gamma));
}

double linear_energy_bound(long k, double rho, double e0) {
  return std::pow(rho, static_cast<double>(k)) * e0;
}

double linear_distance_bound(long k, double rho, double s, double f_norm, double weighted0) {
  const double sf = s * f_norm;
  return (1.0 + sf) / (1.0 - sf) * std::pow(rho, static_cast<double>(k)) * weighted0;
}

namespace {

template <typename T>
T need(const std::optional<T>& v, const char* name) {
  if (!v) throw std::invalid_argument(std::string("theorem_bound: missing constant '") + name + "'");
  return *v;
}

}  // namespace

std::optional<double> theorem_bound(Regime regime, long k, const TheoremConstants& constants) {
  switch (regime) {
    case Regime::fixed:
      return std::nullopt;
    case Regime::varying_sc: {
      if (k < 0) throw std::invalid_argument("theorem_bound: k must be >= 0");
      const double alpha =
          varying_rate_alpha(need(constants.mu, "mu"), need(constants.c, "c"),
                             need(constants.s, "s"), need(constants.f_norm, "f_norm"));
      return varying_energy_bound(k, alpha, need(constants.energy_start, "energy_start"));
    }
    case Regime::accelerated: {
      const long k0 = need(constants.k0, "k0");
      const double c = need(constants.c, "c");
      const double e0 = need(constants.energy_start, "energy_start");
      if (k < k0) return std::nullopt;
      return accelerated_distance_bound(k, c, e0);
    }
    case Regime::optimal_ss: {
      if (k < 0) throw std::invalid_argument("theorem_bound: k must be >= 0");
      const double rho = linear_rate_rho(need(constants.s, "s"), need(constants.f_norm, "f_norm"),
                                         need(constants.mu, "mu"), need(constants.gamma, "gamma"));
      return linear_energy_bound(k, rho, need(constants.energy_start, "energy_start"));
    }
  }
  return std::nullopt;
}

TheoremConstants theorem_constants(const Schedule& schedule) {
  TheoremConstants tc;
  tc.s = schedule.s();
  tc.f_norm = schedule.f_norm();
  tc.mu = schedule.mu();
  tc.gamma = schedule.gamma();
  if (schedule.regime() == Regime::varying_sc || schedule.regime() == Regime::accelerated) {
    tc.c = schedule.c();
  }
  if (schedule.regime() == Regime::accelerated) tc.k0 = k0_threshold(schedule.mu(), schedule.c());
  return tc;
}

}  // namespace pdhg
