#include "pdhg/engine.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace pdhg {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::budget:
      return "budget";
    case Termination::residual_tol:
      return "residual_tol";
    case Termination::divergence_guard:
      return "divergence_guard";
  }
  return "unknown";
}

StepOutput pdhg_step(const SaddleProblem& problem, const Vector& x, const Vector& y,
                     const Vector& /*x_prev*/, const StepParams& step) {
  if (!(step.tau > 0.0) || !(step.sigma > 0.0)) {
    throw std::invalid_argument("pdhg_step: tau and sigma must be positive");
  }
  if (!(step.theta >= 0.0 && step.theta <= 1.0)) {
    throw std::invalid_argument("pdhg_step: theta must lie in [0, 1]");
  }
  if (x.size() != problem.primal_dim() || y.size() != problem.dual_dim()) {
    throw std::invalid_argument("pdhg_step: iterate dimensions do not match the problem");
  }
  const Matrix& coupling = problem.coupling();
  StepOutput out;
  out.x_next = problem.prox_f(x - step.tau * (coupling.transpose() * y), step.tau);
  out.x_bar = out.x_next + step.theta * (out.x_next - x);
  out.y_next = problem.prox_gstar(y + step.sigma * (coupling * out.x_bar), step.sigma);
  return out;
}

PrimalDualPair Trajectory::final_pair() const {
  if (records.empty()) return initial;
  return {records.back().x_next, records.back().y_next};
}

Trajectory run(const SaddleProblem& problem, const Schedule& schedule, const PrimalDualPair& init,
               const RunOptions& options, const StepObserver& observer) {
  if (options.budget < 1) throw std::invalid_argument("run: budget must be >= 1");
  if (options.record_every < 1) throw std::invalid_argument("run: record_every must be >= 1");
  if (init.x.size() != problem.primal_dim() || init.y.size() != problem.dual_dim()) {
    throw std::invalid_argument("run: initial pair dimensions do not match the problem");
  }
  const Matrix& coupling = problem.coupling();

  Trajectory traj{{}, init, schedule, Termination::budget, 0};
  Vector x = init.x;
  Vector y = init.y;
  Vector x_prev = init.x;
  Vector y_prev = init.y;
  if (schedule.regime() == Regime::accelerated) {
    // Dual half of step 0: theta_0 = 0 and x_0 := x_1, so xbar_1 = x_1.
    const double sigma0 = schedule.initial_dual_step();
    y = problem.prox_gstar(y_prev + sigma0 * (coupling * x), sigma0);
  }

  const long k_first = schedule.k_start();
  const long k_last = k_first + options.budget - 1;
  StepRecord rec;
  for (long k = k_first; k <= k_last; ++k) {
    rec.k = k;
    rec.step = schedule.at(k);
    StepOutput out = pdhg_step(problem, x, y, x_prev, rec.step);
    rec.x_prev = std::move(x_prev);
    rec.y_prev = std::move(y_prev);
    rec.x = std::move(x);
    rec.y = std::move(y);
    rec.x_next = std::move(out.x_next);
    rec.x_bar = std::move(out.x_bar);
    rec.y_next = std::move(out.y_next);
    rec.primal_residual = ((rec.x - rec.x_next) / rec.step.tau +
                           coupling.transpose() * (rec.y_next - rec.y))
                              .norm();
    rec.dual_residual =
        ((rec.y - rec.y_next) / rec.step.sigma + coupling * (rec.x_bar - rec.x_next)).norm();
    ++traj.steps;

    const double size = rec.x_next.norm() + rec.y_next.norm();
    bool stop = false;
    if (!std::isfinite(size) || size > kDivergenceGuard) {
      traj.termination = Termination::divergence_guard;
      stop = true;
    } else if (std::max(rec.primal_residual, rec.dual_residual) <= options.tol) {
      traj.termination = Termination::residual_tol;
      stop = true;
    } else if (k == k_last) {
      traj.termination = Termination::budget;
      stop = true;
    }

    if (observer) observer(rec);
    if (stop || (k - k_first) % options.record_every == 0) traj.records.push_back(rec);
    if (stop) break;

    x_prev = rec.x;
    y_prev = rec.y;
    x = rec.x_next;
    y = rec.y_next;
  }
  return traj;
}

InclusionResiduals optimality_residual(const SaddleProblem& problem, const StepRecord& record) {
  const Matrix& coupling = problem.coupling();
  const Vector x_offset =
      coupling.transpose() * record.y + (record.x_next - record.x) / record.step.tau;
  const Vector y_offset =
      -(coupling * record.x_bar) + (record.y_next - record.y) / record.step.sigma;
  return {problem.subdiff_f_distance(record.x_next, x_offset),
          problem.subdiff_gstar_distance(record.y_next, y_offset)};
}

}  // namespace pdhg
