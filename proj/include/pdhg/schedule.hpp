#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pdhg {

/// The four step-size regimes:
///  - fixed:        constant (tau, sigma), tau * sigma = s^2, theta = 1
///  - varying_sc:   tau_k = 1/(c(k+1)), sigma_k = c s^2 (k+1), theta = 1 (f strongly convex)
///  - accelerated:  tau_k = 1/(c k), sigma_k = c s^2 (k+1), theta_k = k/(k+1), k >= 1
///  - optimal_ss:   tau = s sqrt(gamma/mu), sigma = s sqrt(mu/gamma), theta = 1
enum class Regime { fixed, varying_sc, accelerated, optimal_ss };

std::string_view to_string(Regime regime);
/// Accepts the names printed by to_string; throws std::invalid_argument otherwise.
Regime regime_from_string(std::string_view name);

struct StepParams {
  double tau;
  double sigma;
  double theta;
};

/// Schedule construction failure. `parameter()` names the offending input
/// ("s", "c", "mu", "gamma", "tau", "sigma").
class ScheduleError : public std::invalid_argument {
 public:
  ScheduleError(std::string parameter, const std::string& what)
      : std::invalid_argument(what), parameter_(std::move(parameter)) {}
  const std::string& parameter() const { return parameter_; }

 private:
  std::string parameter_;
};

struct ScheduleParams {
  std::optional<double> s;
  std::optional<double> c;
  std::optional<double> tau;
  std::optional<double> sigma;
  std::optional<double> mu;
  std::optional<double> gamma;
};

/// Immutable step-size schedule. Every query is a pure function of k.
class Schedule {
 public:
  Regime regime() const { return regime_; }
  double s() const { return s_; }
  /// Schedule constant; 0 for fixed and optimal_ss.
  double c() const { return c_; }
  /// Constant steps of fixed / optimal_ss; 0 for the varying regimes.
  double tau() const { return tau_; }
  double sigma() const { return sigma_; }
  double mu() const { return mu_; }
  double gamma() const { return gamma_; }
  /// ||F|| the schedule was validated against.
  double f_norm() const { return f_norm_; }
  long k_start() const { return regime_ == Regime::accelerated ? 1 : 0; }

  /// (tau_k, sigma_k, theta_k); throws std::out_of_range for k < k_start().
  StepParams at(long k) const;

  /// 1 / tau_k for any k >= 0. For the accelerated regime 1/tau_0 := 0.
  double inverse_tau(long k) const;

  /// sigma_0 of the accelerated regime, used for the dual half-step that
  /// produces y_1 from y_0 (theta_0 = tau_1 / tau_0 = 0).
  double initial_dual_step() const;

 private:
  friend Schedule make_schedule(Regime, const ScheduleParams&, double);
  Schedule() = default;

  Regime regime_ = Regime::fixed;
  double s_ = 0.0;
  double c_ = 0.0;
  double tau_ = 0.0;
  double sigma_ = 0.0;
  double mu_ = 0.0;
  double gamma_ = 0.0;
  double f_norm_ = 0.0;
};

/// Builds and validates a schedule.
///
/// Defaults: s = 0.9/||F||; c = mu/2 (varying_sc) or 2 mu/3 (accelerated).
/// For fixed, (tau, sigma) default to (s, s); if only one is given the other is
/// s^2 divided by it; if both are given, s defaults to sqrt(tau sigma).
///
/// Throws ScheduleError when s ||F|| >= 1, when c leaves (0, 2mu) resp.
/// (0, mu), or when a required modulus is missing or zero.
Schedule make_schedule(Regime regime, const ScheduleParams& params, double f_norm);

/// K0 = max(1, ceil(c / (2 mu - 2 c))) for 0 < c < mu.
long k0_threshold(double mu, double c);

}  // namespace pdhg
