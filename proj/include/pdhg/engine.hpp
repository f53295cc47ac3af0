#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "pdhg/saddle_problem.hpp"
#include "pdhg/schedule.hpp"

namespace pdhg {

struct StepOutput {
  Vector x_next;
  Vector x_bar;
  Vector y_next;
};

/// One PDHG iteration written as two prox calls on linearly shifted inputs:
///   x_{k+1}  = prox_f(x_k - tau F^T y_k, tau)
///   xbar     = x_{k+1} + theta (x_{k+1} - x_k)
///   y_{k+1}  = prox_g*(y_k + sigma F xbar, sigma)
/// x_prev is not used by the update.
StepOutput pdhg_step(const SaddleProblem& problem, const Vector& x, const Vector& y,
                     const Vector& x_prev, const StepParams& step);

/// Everything needed to evaluate any of the Lyapunov functions at k and k+1
/// without neighbouring records: the record carries (x_{k-1}, y_{k-1}) too.
struct StepRecord {
  long k = 0;
  StepParams step{};
  Vector x_prev;  // x_{k-1}; equals x_k at the first step
  Vector y_prev;  // y_{k-1}; equals y_k at the first step except after the accelerated half-step
  Vector x;       // x_k
  Vector y;       // y_k
  Vector x_next;  // x_{k+1}
  Vector x_bar;   // xbar_{k+1}
  Vector y_next;  // y_{k+1}
  /// ||(x_k - x_{k+1})/tau_k + F^T (y_{k+1} - y_k)||, the norm of an element
  /// of df(x_{k+1}) + F^T y_{k+1}.
  double primal_residual = 0.0;
  /// ||(y_k - y_{k+1})/sigma_k + F (xbar_{k+1} - x_{k+1})||, the norm of an
  /// element of dg*(y_{k+1}) - F x_{k+1}.
  double dual_residual = 0.0;
};

enum class Termination { budget, residual_tol, divergence_guard };
std::string_view to_string(Termination t);

/// Recorded run. `initial` is the user's starting pair; for the accelerated
/// regime it is read as (x_1, y_0) and y_1 comes from the dual half-step.
struct Trajectory {
  std::vector<StepRecord> records;
  PrimalDualPair initial;
  Schedule schedule;
  Termination termination = Termination::budget;
  long steps = 0;

  /// (x, y) after the last executed step.
  PrimalDualPair final_pair() const;
};

struct RunOptions {
  long budget = 1000;
  double tol = 1e-10;
  long record_every = 1;
};

/// Observer invoked on every executed step, recorded or not.
using StepObserver = std::function<void(const StepRecord&)>;

inline constexpr double kDivergenceGuard = 1e12;

/// Iterates until the budget is spent, max(primal, dual residual) <= tol, or
/// ||x|| + ||y|| exceeds kDivergenceGuard. Records steps k_start,
/// k_start + record_every, ... and always the last one.
Trajectory run(const SaddleProblem& problem, const Schedule& schedule, const PrimalDualPair& init,
               const RunOptions& options, const StepObserver& observer = {});

struct InclusionResiduals {
  double r_x;
  double r_y;
};

/// Residuals of the inclusions characterizing the two prox steps of `record`:
///   r_x = dist(0, df(x_{k+1}) + F^T y_k + (x_{k+1} - x_k)/tau_k)
///   r_y = dist(0, dg*(y_{k+1}) - F xbar_{k+1} + (y_{k+1} - y_k)/sigma_k)
/// Throws MissingOracleError without subdifferential oracles.
InclusionResiduals optimality_residual(const SaddleProblem& problem, const StepRecord& record);

}  // namespace pdhg
