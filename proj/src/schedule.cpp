#include "pdhg/schedule.hpp"

#include <cmath>
#include <sstream>

#include "pdhg/saddle_problem.hpp"

namespace pdhg {

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::fixed:
      return "fixed";
    case Regime::varying_sc:
      return "varying_sc";
    case Regime::accelerated:
      return "accelerated";
    case Regime::optimal_ss:
      return "optimal_ss";
  }
  return "unknown";
}

Regime regime_from_string(std::string_view name) {
  for (Regime r : {Regime::fixed, Regime::varying_sc, Regime::accelerated, Regime::optimal_ss}) {
    if (to_string(r) == name) return r;
  }
  throw std::invalid_argument("unknown regime '" + std::string(name) +
                              "' (expected fixed, varying_sc, accelerated or optimal_ss)");
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double require_positive_modulus(const std::optional<double>& value, const char* name,
                                Regime regime) {
  if (!value) {
    throw ScheduleError(name, std::string(name) + " is required by the " +
                                  std::string(to_string(regime)) + " regime");
  }
  if (!(*value > 0.0)) {
    throw ScheduleError(name, std::string(name) + " = " + fmt(*value) + " but the " +
                                  std::string(to_string(regime)) +
                                  " regime requires a strongly convex term (" + name + " > 0)");
  }
  return *value;
}

void require_positive(const std::optional<double>& value, const char* name) {
  if (value && !(*value > 0.0)) {
    throw ScheduleError(name, std::string(name) + " must be positive, got " + fmt(*value));
  }
}

}  // namespace

Schedule make_schedule(Regime regime, const ScheduleParams& params, double f_norm) {
  if (!(f_norm >= 0.0)) throw std::invalid_argument("make_schedule: ||F|| must be >= 0");
  require_positive(params.s, "s");
  require_positive(params.tau, "tau");
  require_positive(params.sigma, "sigma");
  require_positive(params.c, "c");
  if (params.mu && !(*params.mu >= 0.0)) throw ScheduleError("mu", "mu must be >= 0");
  if (params.gamma && !(*params.gamma >= 0.0)) throw ScheduleError("gamma", "gamma must be >= 0");

  Schedule sched;
  sched.regime_ = regime;
  sched.f_norm_ = f_norm;
  sched.mu_ = params.mu.value_or(0.0);
  sched.gamma_ = params.gamma.value_or(0.0);

  if (regime == Regime::fixed) {
    if (params.tau && params.sigma) {
      const double implied = std::sqrt(*params.tau * *params.sigma);
      if (params.s && std::abs(*params.s - implied) > 1e-12 * implied) {
        throw ScheduleError("s", "tau * sigma = " + fmt(*params.tau * *params.sigma) +
                                     " does not equal s^2 = " + fmt(*params.s * *params.s));
      }
      sched.s_ = implied;
      sched.tau_ = *params.tau;
      sched.sigma_ = *params.sigma;
    } else {
      sched.s_ = params.s.value_or(default_step_scale(f_norm));
      if (params.tau) {
        sched.tau_ = *params.tau;
        sched.sigma_ = sched.s_ * sched.s_ / sched.tau_;
      } else if (params.sigma) {
        sched.sigma_ = *params.sigma;
        sched.tau_ = sched.s_ * sched.s_ / sched.sigma_;
      } else {
        sched.tau_ = sched.s_;
        sched.sigma_ = sched.s_;
      }
    }
  } else {
    sched.s_ = params.s.value_or(default_step_scale(f_norm));
    if (params.tau || params.sigma) {
      throw ScheduleError(params.tau ? "tau" : "sigma",
                          std::string("explicit step sizes are only accepted by the fixed "
                                      "regime, not by ") +
                              std::string(to_string(regime)));
    }
  }

  if (!check_admissibility(sched.s_, f_norm).admissible) {
    throw ScheduleError("s", "step scale s = " + fmt(sched.s_) + " violates s * ||F|| < 1 (||F|| = " +
                                 fmt(f_norm) + ")");
  }

  switch (regime) {
    case Regime::fixed:
      if (params.c) throw ScheduleError("c", "the fixed regime takes no schedule constant c");
      break;
    case Regime::varying_sc: {
      const double mu = require_positive_modulus(params.mu, "mu", regime);
      sched.c_ = params.c.value_or(mu / 2.0);
      if (!(sched.c_ > 0.0 && sched.c_ < 2.0 * mu)) {
        throw ScheduleError("c", "c = " + fmt(sched.c_) + " must lie in (0, 2 mu) = (0, " +
                                     fmt(2.0 * mu) + ")");
      }
      break;
    }
    case Regime::accelerated: {
      const double mu = require_positive_modulus(params.mu, "mu", regime);
      sched.c_ = params.c.value_or(2.0 * mu / 3.0);
      if (!(sched.c_ > 0.0 && sched.c_ < mu)) {
        throw ScheduleError("c", "c = " + fmt(sched.c_) + " must lie in (0, mu) = (0, " +
                                     fmt(mu) + ")");
      }
      break;
    }
    case Regime::optimal_ss: {
      const double mu = require_positive_modulus(params.mu, "mu", regime);
      const double gamma = require_positive_modulus(params.gamma, "gamma", regime);
      if (params.c) throw ScheduleError("c", "the optimal_ss regime takes no schedule constant c");
      sched.tau_ = sched.s_ * std::sqrt(gamma / mu);
      sched.sigma_ = sched.s_ * std::sqrt(mu / gamma);
      break;
    }
  }
  return sched;
}

StepParams Schedule::at(long k) const {
  if (k < k_start()) {
    throw std::out_of_range("schedule index k = " + std::to_string(k) + " is below k_start = " +
                            std::to_string(k_start()));
  }
  const double kk = static_cast<double>(k);
  switch (regime_) {
    case Regime::fixed:
    case Regime::optimal_ss:
      return {tau_, sigma_, 1.0};
    case Regime::varying_sc:
      return {1.0 / (c_ * (kk + 1.0)), c_ * s_ * s_ * (kk + 1.0), 1.0};
    case Regime::accelerated:
      return {1.0 / (c_ * kk), c_ * s_ * s_ * (kk + 1.0), kk / (kk + 1.0)};
  }
  return {tau_, sigma_, 1.0};
}

double Schedule::inverse_tau(long k) const {
  if (k < 0) throw std::out_of_range("inverse_tau: negative k");
  if (regime_ == Regime::accelerated) return c_ * static_cast<double>(k);
  return 1.0 / at(k).tau;
}

double Schedule::initial_dual_step() const {
  if (regime_ != Regime::accelerated) {
    throw std::logic_error("initial_dual_step is only defined for the accelerated regime");
  }
  return c_ * s_ * s_;
}

long k0_threshold(double mu, double c) {
  if (!(c > 0.0) || !(c < mu)) {
    throw std::invalid_argument("k0_threshold requires 0 < c < mu (c = " + fmt(c) +
                                ", mu = " + fmt(mu) + ")");
  }
  // Shave a relative 1e-12 so that exact integer ratios (c = 2mu/3 gives 1)
  // are not pushed up by rounding in the denominator.
  const double ratio = c / (2.0 * mu - 2.0 * c);
  const double raw = std::ceil(ratio * (1.0 - 1e-12));
  return std::max(1L, static_cast<long>(raw));
}

}  // namespace pdhg
