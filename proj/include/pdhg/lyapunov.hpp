#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "pdhg/engine.hpp"
#include "pdhg/saddle_problem.hpp"
#include "pdhg/schedule.hpp"

namespace pdhg {

/// E = ||x - x*||^2/(2 tau) + ||y - y*||^2/(2 sigma) - <F(x - x*), y - y*>.
double lyapunov_fixed(const Vector& x, const Vector& y, const PrimalDualPair& saddle, double tau,
                      double sigma, const Matrix& coupling);

/// Same quadratic form as lyapunov_fixed, evaluated with the steps of iteration k.
double lyapunov_varying(const Vector& x, const Vector& y, const PrimalDualPair& saddle,
                        double tau_k, double sigma_k, const Matrix& coupling);

/// Accelerated energy
///   ||x_k - x*||^2/(2 tau_k^2) + ||y_{k-1} - y*||^2/(2 s^2)
///     + <F(x_k - x_{k-1}), y_{k-1} - y*>/tau_{k-1} + ||x_k - x_{k-1}||^2/(2 tau_{k-1}^2).
/// Without tau_prev the convention 1/tau_0 = 0 applies and the last two terms vanish.
double lyapunov_accelerated(const Vector& x_k, const Vector& x_prev, const Vector& y_prev,
                            const PrimalDualPair& saddle, double tau_k,
                            std::optional<double> tau_prev, double s, const Matrix& coupling);

/// NE = ||dx||^2/(2 tau) + ||dy||^2/(2 sigma) - <F dx, dy>.
double numerical_error(const Vector& dx, const Vector& dy, double tau, double sigma,
                       const Matrix& coupling);

/// Accelerated NE = ||dx||^2/(2 tau_prev^2) - <F dx, dy>/tau_prev + ||dy||^2/(2 s^2);
/// tau_prev absent means 1/tau_prev = 0.
double numerical_error_accelerated(const Vector& dx, const Vector& dy,
                                   std::optional<double> tau_prev, double s,
                                   const Matrix& coupling);

/// Which descent inequality applies.
///  primal_strong:  E(k+1) - E(k) <= -(mu + 1/(2tau_k) - 1/(2tau_{k+1}))||x_{k+1}-x*||^2
///                                   - (1/(2sigma_k) - 1/(2sigma_{k+1}))||y_{k+1}-y*||^2
///  accelerated:    E(k+1) - E(k) <= -(mu/tau_k + 1/(2tau_k^2) - 1/(2tau_{k+1}^2))||x_{k+1}-x*||^2
///  doubly_strong:  E(k+1) - E(k) <= -(mu ||x_{k+1}-x*||^2 + gamma ||y_{k+1}-y*||^2)
enum class LemmaKind { primal_strong, accelerated, doubly_strong };
std::string_view to_string(LemmaKind kind);

/// Matching lemma for a regime on a problem, or nullopt when none applies
/// (e.g. the fixed regime on a merely convex instance).
std::optional<LemmaKind> lemma_for(Regime regime, const SaddleProblem& problem);

/// Slack tolerance 1e-8 (1 + |E(k)|).
double lemma_tolerance(double energy);

struct LyapunovRecord {
  long k = 0;
  double energy = 0.0;       // E(k)
  double energy_next = 0.0;  // E(k+1)
  double numerical_error = 0.0;
  double lemma_rhs = 0.0;
  /// lemma_rhs - (E(k+1) - E(k)); >= -lemma_tolerance(E(k)) certifies the step.
  double lemma_slack = 0.0;
  /// Coefficient of -||x_{k+1} - x*||^2 in the lemma (sign condition of the
  /// rate theorems); for doubly_strong it is mu.
  double descent_coefficient = 0.0;
  bool certified = true;
  std::optional<double> theorem_bound;
};

/// Evaluates E(k), E(k+1), NE and the lemma for a single step record.
LyapunovRecord evaluate_step(LemmaKind kind, const StepRecord& record, const SaddleProblem& problem,
                             const Schedule& schedule, const PrimalDualPair& saddle);

/// E(k) at the pre-step state of `record`, in the energy form used by `regime`.
double energy_at(const StepRecord& record, const Schedule& schedule, const PrimalDualPair& saddle,
                 const Matrix& coupling);

/// NE of the step in `record`: the accelerated form with dx = x_k - x_{k-1},
/// dy = y_k - y_{k-1}, otherwise the fixed form with dx = x_{k+1} - x_k.
double numerical_error_at(const StepRecord& record, const Schedule& schedule,
                          const Matrix& coupling);

class LemmaCheckError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LemmaReport {
  LemmaKind kind = LemmaKind::primal_strong;
  std::vector<LyapunovRecord> records;
  bool valid = true;
  /// Smallest lemma_slack / (1 + |E(k)|) seen.
  double worst_normalized_slack = 0.0;
};

/// Checks the descent lemma of `regime` on every record of `trajectory`.
/// Refuses (LemmaCheckError) on regime/trajectory mismatch, when no lemma
/// applies, or when s ||F|| >= 1.
LemmaReport check_lemma(Regime regime, const Trajectory& trajectory, const SaddleProblem& problem,
                        const PrimalDualPair& saddle);

// Rate-theorem bounds.

/// alpha = min((2mu - c)/(s + c), 1/(1 + c s ||F||^2)).
double varying_rate_alpha(double mu, double c, double s, double f_norm);
/// (1 + alpha) (k+1)! / (k+1+alpha)! * E(0), factorials through the Gamma function.
double varying_energy_bound(long k, double alpha, double e0);
/// (1+s||F||)/(1-s||F||) (1+alpha) k!/(k+1+alpha)! (||x_0-x*||^2 + ||y_0-y*||^2/(c^2 s^2)).
double varying_distance_bound(long k, double alpha, double s, double f_norm, double c,
                              double x0_dist_sq, double y0_dist_sq);
/// 2 E(K0) / (c^2 k^2).
double accelerated_distance_bound(long k, double c, double energy_k0);
/// rho = (1 + s||F||) / (1 + s||F|| + 2 s sqrt(mu gamma)).
double linear_rate_rho(double s, double f_norm, double mu, double gamma);
double linear_energy_bound(long k, double rho, double e0);
/// Bound on mu ||x_k - x*||^2 + gamma ||y_k - y*||^2.
double linear_distance_bound(long k, double rho, double s, double f_norm, double weighted0);

struct TheoremConstants {
  std::optional<double> s;
  std::optional<double> f_norm;
  std::optional<double> mu;
  std::optional<double> gamma;
  std::optional<double> c;
  /// E(0) for varying_sc / optimal_ss, E(K0) for accelerated.
  std::optional<double> energy_start;
  std::optional<long> k0;
};

/// The regime's headline bound at iteration k: a bound on E(k) for varying_sc
/// and optimal_ss, a bound on ||x_k - x*||^2 for accelerated (nullopt for
/// k < K0), nullopt for fixed. Throws std::invalid_argument naming a missing
/// constant.
std::optional<double> theorem_bound(Regime regime, long k, const TheoremConstants& constants);

/// Fills TheoremConstants from a schedule (s, ||F||, mu, gamma, c, K0).
TheoremConstants theorem_constants(const Schedule& schedule);

}  // namespace pdhg
