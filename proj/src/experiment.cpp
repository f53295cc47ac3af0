#include "pdhg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pdhg/engine.hpp"
#include "pdhg/lyapunov.hpp"
#include "pdhg/ode.hpp"
#include "pdhg/rates.hpp"

namespace pdhg {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Check check) {
  switch (check) {
    case Check::lemma:
      return "lemma";
    case Check::theorem:
      return "theorem";
    case Check::rate_fit:
      return "rate_fit";
    case Check::ode_compare:
      return "ode_compare";
  }
  return "unknown";
}

Check check_from_string(std::string_view name) {
  for (Check c : {Check::lemma, Check::theorem, Check::rate_fit, Check::ode_compare}) {
    if (to_string(c) == name) return c;
  }
  throw std::invalid_argument("unknown check '" + std::string(name) + "'");
}

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass:
      return "PASS";
    case CheckStatus::fail:
      return "FAIL";
    case CheckStatus::skipped:
      return "SKIPPED";
  }
  return "unknown";
}

bool ExperimentResult::all_passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& c) { return c.status == CheckStatus::fail; });
}

namespace {

// ---------------------------------------------------------------------------
// Parsing helpers. Every accessor names the dotted key it failed on.

std::string join_key(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& prefix) {
  for (const auto& item : obj.items()) {
    const bool known = std::find(allowed.begin(), allowed.end(), item.key()) != allowed.end();
    if (!known) {
      const std::string key = join_key(prefix, item.key());
      throw ConfigError(key, "unknown key '" + key + "'");
    }
  }
}

const json& require_object(const json& j, const std::string& key) {
  if (!j.is_object()) throw ConfigError(key, "'" + key + "' must be an object");
  return j;
}

double read_number(const json& obj, const std::string& name, const std::string& prefix) {
  const std::string key = join_key(prefix, name);
  const json& v = obj.at(name);
  if (!v.is_number()) throw ConfigError(key, "'" + key + "' must be a number");
  return v.get<double>();
}

long read_integer(const json& obj, const std::string& name, const std::string& prefix) {
  const std::string key = join_key(prefix, name);
  const json& v = obj.at(name);
  if (!v.is_number_integer()) throw ConfigError(key, "'" + key + "' must be an integer");
  return v.get<long>();
}

std::string read_string(const json& obj, const std::string& name, const std::string& prefix) {
  const std::string key = join_key(prefix, name);
  const json& v = obj.at(name);
  if (!v.is_string()) throw ConfigError(key, "'" + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> read_number_list(const json& obj, const std::string& name,
                                     const std::string& prefix) {
  const std::string key = join_key(prefix, name);
  const json& v = obj.at(name);
  if (!v.is_array()) throw ConfigError(key, "'" + key + "' must be a list of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) throw ConfigError(key, "'" + key + "' must be a list of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, "'" + key + "' " + what);
}

InstanceSpec parse_instance(const json& j) {
  require_object(j, "instance");
  reject_unknown(j,
                 {"kind", "seed", "d", "d1", "d2", "m", "lambda", "mu", "gamma", "a_min_singular",
                  "a_condition", "f_scale"},
                 "instance");
  if (!j.contains("kind")) throw ConfigError("instance.kind", "missing required key 'instance.kind'");
  InstanceSpec spec;
  try {
    spec.kind = instance_kind_from_string(read_string(j, "kind", "instance"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("instance.kind", e.what());
  }
  if (j.contains("seed")) {
    const long seed = read_integer(j, "seed", "instance");
    require(seed >= 0, "instance.seed", "must be >= 0");
    spec.seed = static_cast<std::uint64_t>(seed);
  }
  if (j.contains("d")) {
    if (j.contains("d1") || j.contains("d2")) {
      throw ConfigError("instance.d", "'instance.d' cannot be combined with d1/d2");
    }
    spec.d1 = spec.d2 = read_integer(j, "d", "instance");
  }
  if (j.contains("d1")) spec.d1 = read_integer(j, "d1", "instance");
  if (j.contains("d2")) spec.d2 = read_integer(j, "d2", "instance");
  if (j.contains("m")) spec.m = read_integer(j, "m", "instance");
  if (j.contains("lambda")) spec.lambda = read_number(j, "lambda", "instance");
  if (j.contains("mu")) spec.mu = read_number(j, "mu", "instance");
  if (j.contains("gamma")) spec.gamma = read_number(j, "gamma", "instance");
  if (j.contains("a_min_singular")) {
    spec.a_min_singular = read_number(j, "a_min_singular", "instance");
  }
  if (j.contains("a_condition")) spec.a_condition = read_number(j, "a_condition", "instance");
  if (j.contains("f_scale")) spec.f_scale = read_number(j, "f_scale", "instance");

  const std::string dkey = j.contains("d") ? "instance.d" : "instance.d1";
  require(spec.d1 >= (spec.kind == InstanceKind::gen_lasso ? 2 : 1), dkey,
          spec.kind == InstanceKind::gen_lasso ? "must be >= 2" : "must be >= 1");
  switch (spec.kind) {
    case InstanceKind::lasso:
      require(spec.m >= 1, "instance.m", "must be >= 1");
      require(spec.lambda > 0.0, "instance.lambda", "must be positive");
      require(spec.a_min_singular > 0.0, "instance.a_min_singular", "must be positive");
      require(spec.a_condition >= 1.0, "instance.a_condition", "must be >= 1");
      break;
    case InstanceKind::gen_lasso:
      require(spec.lambda > 0.0, "instance.lambda", "must be positive");
      break;
    case InstanceKind::quad_pair:
      require(spec.d2 >= 1, j.contains("d") ? "instance.d" : "instance.d2", "must be >= 1");
      require(spec.mu > 0.0, "instance.mu", "must be positive (mu)");
      require(spec.gamma > 0.0, "instance.gamma", "must be positive (gamma)");
      require(spec.f_scale > 0.0, "instance.f_scale", "must be positive");
      break;
  }
  return spec;
}

struct ScheduleInputs {
  std::optional<double> s;
  std::optional<double> c;
  std::optional<double> tau;
  std::optional<double> sigma;
};

std::string schedule_key(const std::string& parameter) {
  if (parameter == "mu" || parameter == "gamma") return parameter;
  return "schedule." + parameter;
}

struct Resolved {
  Instance instance;
  double f_norm;
  Schedule schedule;
};

Resolved resolve(const InstanceSpec& spec, Regime regime, const ScheduleInputs& in) {
  Instance inst = build_instance(spec);
  const double f_norm = operator_norm(inst.problem.coupling());
  ScheduleParams params;
  params.s = in.s;
  params.c = in.c;
  params.tau = in.tau;
  params.sigma = in.sigma;
  params.mu = inst.problem.mu();
  params.gamma = inst.problem.gamma();
  try {
    Schedule sched = make_schedule(regime, params, f_norm);
    return {std::move(inst), f_norm, sched};
  } catch (const ScheduleError& e) {
    const std::string key = schedule_key(e.parameter());
    throw ConfigError(key, "invalid '" + key + "' for regime " + std::string(to_string(regime)) +
                               ": " + e.what());
  }
}

void apply_schedule(ExperimentConfig& config, const Schedule& sched) {
  config.s = sched.s();
  config.c.reset();
  config.tau.reset();
  config.sigma.reset();
  if (config.regime == Regime::varying_sc || config.regime == Regime::accelerated) {
    config.c = sched.c();
  }
  if (config.regime == Regime::fixed) {
    config.tau = sched.tau();
    config.sigma = sched.sigma();
  }
}

ordered_json to_json(const ExperimentConfig& config) {
  ordered_json j;
  const InstanceSpec& spec = config.instance;
  ordered_json inst;
  inst["kind"] = std::string(to_string(spec.kind));
  inst["seed"] = spec.seed;
  inst["d1"] = spec.d1;
  inst["d2"] = spec.d2;
  inst["m"] = spec.m;
  inst["lambda"] = spec.lambda;
  inst["mu"] = spec.mu;
  inst["gamma"] = spec.gamma;
  inst["a_min_singular"] = spec.a_min_singular;
  inst["a_condition"] = spec.a_condition;
  inst["f_scale"] = spec.f_scale;
  j["instance"] = inst;
  j["regime"] = std::string(to_string(config.regime));
  ordered_json sched;
  sched["s"] = config.s;
  if (config.c) sched["c"] = *config.c;
  if (config.tau) sched["tau"] = *config.tau;
  if (config.sigma) sched["sigma"] = *config.sigma;
  j["schedule"] = sched;
  j["budget"] = config.budget;
  j["tol"] = config.tol;
  j["record_every"] = config.record_every;
  ordered_json checks = ordered_json::array();
  for (Check c : config.checks) checks.push_back(std::string(to_string(c)));
  j["checks"] = checks;
  j["output"] = config.output;
  if (config.sweep) {
    ordered_json sw;
    if (!config.sweep->c.empty()) sw["c"] = config.sweep->c;
    if (!config.sweep->c_over_mu.empty()) sw["c_over_mu"] = config.sweep->c_over_mu;
    if (!config.sweep->s.empty()) sw["s"] = config.sweep->s;
    j["sweep"] = sw;
  }
  return j;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("<document>", "config must be a JSON object");
  reject_unknown(j,
                 {"instance", "regime", "schedule", "budget", "tol", "record_every", "checks",
                  "output", "sweep"},
                 "");

  ExperimentConfig config;
  if (!j.contains("instance")) throw ConfigError("instance", "missing required key 'instance'");
  config.instance = parse_instance(j.at("instance"));

  if (!j.contains("regime")) throw ConfigError("regime", "missing required key 'regime'");
  try {
    config.regime = regime_from_string(read_string(j, "regime", ""));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("regime", e.what());
  }

  ScheduleInputs inputs;
  if (j.contains("schedule")) {
    const json& sj = require_object(j.at("schedule"), "schedule");
    reject_unknown(sj, {"s", "c", "tau", "sigma"}, "schedule");
    if (sj.contains("s")) inputs.s = read_number(sj, "s", "schedule");
    if (sj.contains("c")) inputs.c = read_number(sj, "c", "schedule");
    if (sj.contains("tau")) inputs.tau = read_number(sj, "tau", "schedule");
    if (sj.contains("sigma")) inputs.sigma = read_number(sj, "sigma", "schedule");
  }

  if (j.contains("budget")) config.budget = read_integer(j, "budget", "");
  require(config.budget >= 1, "budget", "must be >= 1");
  if (j.contains("tol")) config.tol = read_number(j, "tol", "");
  require(config.tol >= 0.0, "tol", "must be >= 0");
  if (j.contains("record_every")) config.record_every = read_integer(j, "record_every", "");
  require(config.record_every >= 1, "record_every", "must be >= 1");

  if (j.contains("checks")) {
    const json& cj = j.at("checks");
    if (!cj.is_array()) throw ConfigError("checks", "'checks' must be a list of names");
    for (const json& e : cj) {
      if (!e.is_string()) throw ConfigError("checks", "'checks' must be a list of names");
      const std::string name = e.get<std::string>();
      Check c;
      try {
        c = check_from_string(name);
      } catch (const std::invalid_argument&) {
        throw ConfigError("checks." + name, "unknown check '" + name +
                                                "' (expected lemma, theorem, rate_fit, ode_compare)");
      }
      if (std::find(config.checks.begin(), config.checks.end(), c) != config.checks.end()) {
        throw ConfigError("checks." + name, "check '" + name + "' listed twice");
      }
      config.checks.push_back(c);
    }
  } else {
    config.checks = {Check::lemma, Check::theorem, Check::rate_fit};
  }

  if (j.contains("output")) config.output = read_string(j, "output", "");
  require(!config.output.empty(), "output", "must not be empty");

  if (j.contains("sweep")) {
    const json& sw = require_object(j.at("sweep"), "sweep");
    reject_unknown(sw, {"c", "c_over_mu", "s"}, "sweep");
    SweepGrid grid;
    if (sw.contains("c")) grid.c = read_number_list(sw, "c", "sweep");
    if (sw.contains("c_over_mu")) grid.c_over_mu = read_number_list(sw, "c_over_mu", "sweep");
    if (sw.contains("s")) grid.s = read_number_list(sw, "s", "sweep");
    if (!grid.c.empty() && !grid.c_over_mu.empty()) {
      throw ConfigError("sweep.c_over_mu", "'sweep.c' and 'sweep.c_over_mu' are exclusive");
    }
    if (grid.c.empty() && grid.c_over_mu.empty() && grid.s.empty()) {
      throw ConfigError("sweep", "'sweep' grid is empty");
    }
    const bool has_c = config.regime == Regime::varying_sc || config.regime == Regime::accelerated;
    if (!has_c && !(grid.c.empty() && grid.c_over_mu.empty())) {
      throw ConfigError(grid.c.empty() ? "sweep.c_over_mu" : "sweep.c",
                        "regime " + std::string(to_string(config.regime)) + " has no parameter c");
    }
    config.sweep = grid;
  }

  const Resolved r = resolve(config.instance, config.regime, inputs);
  apply_schedule(config, r.schedule);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize(const ExperimentConfig& config) { return to_json(config).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Execution.

namespace {

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt17(const std::optional<double>& v) {
  return v ? fmt17(*v) : std::string("nan");
}

ordered_json json_number(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

constexpr double kTheoremFactor = 1.0 + 1e-6;
constexpr double kContractionSlack = 1e-8;
constexpr double kOdeHalvingRatio = 0.7;
constexpr double kOdeHorizon = 10.0;
// s * ||F|| for the three ODE comparison runs, each half the previous one.
constexpr double kOdeStepScales[] = {0.1, 0.05, 0.025};

struct Context {
  Instance instance;
  double f_norm;
  Schedule schedule;
  PrimalDualPair saddle;
  bool exact_saddle;
  std::optional<SaddleCertificate> reference_certificate;
  std::optional<LemmaKind> lemma;
};

Context make_context(const ExperimentConfig& config) {
  ScheduleInputs in{config.s, config.c, config.tau, config.sigma};
  Resolved r = resolve(config.instance, config.regime, in);
  Context ctx{std::move(r.instance), r.f_norm, r.schedule, {}, false, std::nullopt, std::nullopt};
  if (ctx.instance.exact_saddle) {
    ctx.saddle = *ctx.instance.exact_saddle;
    ctx.exact_saddle = true;
  } else {
    const ReferenceSolution ref = reference_saddle(ctx.instance.problem);
    ctx.saddle = ref.saddle;
    ctx.reference_certificate = ref.certificate;
  }
  ctx.lemma = lemma_for(config.regime, ctx.instance.problem);
  return ctx;
}

struct TheoremTracker {
  bool applicable = false;
  long compared = 0;
  long violations = 0;
  double worst_ratio = 0.0;  // measured / bound

  void compare(double measured, double bound) {
    if (!(measured >= kContractionFloor)) return;
    ++compared;
    const double ratio = measured / bound;
    worst_ratio = std::max(worst_ratio, ratio);
    if (!(measured <= bound * kTheoremFactor)) ++violations;
  }
};

}  // namespace

ExperimentResult execute_to(const ExperimentConfig& config, std::ostream* csv) {
  const Context ctx = make_context(config);
  const SaddleProblem& problem = ctx.instance.problem;
  const Schedule& sched = ctx.schedule;
  const Matrix& coupling = problem.coupling();
  const Regime regime = config.regime;
  TheoremConstants constants = theorem_constants(sched);
  const std::optional<long> k0 =
      regime == Regime::accelerated ? std::optional<long>(*constants.k0) : std::nullopt;

  if (csv) *csv << kCsvHeader << "\n";

  Series dist_series;
  Series energy_series;
  bool lemma_ok = true;
  double worst_slack = std::numeric_limits<double>::infinity();
  TheoremTracker theorem;
  std::optional<double> x0_dist;
  std::optional<double> y0_dist;
  std::optional<double> weighted0;
  std::string pending_row;
  long last_written = -1;
  long last_k = -1;

  const PrimalDualPair start{Vector::Zero(problem.primal_dim()), Vector::Zero(problem.dual_dim())};

  auto observer = [&](const StepRecord& rec) {
    const long k = rec.k;
    const double dist_x = (rec.x - ctx.saddle.x).squaredNorm();
    const double dist_y = (rec.y - ctx.saddle.y).squaredNorm();
    const double energy = energy_at(rec, sched, ctx.saddle, coupling);
    const double ne = numerical_error_at(rec, sched, coupling);
    std::optional<double> slack;
    if (ctx.lemma) {
      const LyapunovRecord lr = evaluate_step(*ctx.lemma, rec, problem, sched, ctx.saddle);
      slack = lr.lemma_slack;
      lemma_ok = lemma_ok && lr.certified;
      worst_slack = std::min(worst_slack, lr.lemma_slack / (1.0 + std::abs(lr.energy)));
    }

    if (k == sched.k_start()) {
      x0_dist = dist_x;
      y0_dist = dist_y;
      weighted0 = sched.mu() * dist_x + sched.gamma() * dist_y;
      if (regime != Regime::accelerated) constants.energy_start = energy;
    }
    if (k0 && k == *k0) constants.energy_start = energy;

    std::optional<double> bound;
    if (regime != Regime::fixed && constants.energy_start) {
      bound = theorem_bound(regime, k, constants);
    }
    if (bound) {
      theorem.applicable = true;
      if (regime == Regime::accelerated) {
        theorem.compare(dist_x, *bound);
      } else {
        theorem.compare(energy, *bound);
        if (regime == Regime::varying_sc) {
          const double alpha = varying_rate_alpha(sched.mu(), sched.c(), sched.s(), ctx.f_norm);
          theorem.compare(dist_x, varying_distance_bound(k, alpha, sched.s(), ctx.f_norm,
                                                         sched.c(), *x0_dist, *y0_dist));
        } else {
          const double rho = linear_rate_rho(sched.s(), ctx.f_norm, sched.mu(), sched.gamma());
          theorem.compare(sched.mu() * dist_x + sched.gamma() * dist_y,
                          linear_distance_bound(k, rho, sched.s(), ctx.f_norm, *weighted0));
        }
      }
    }

    if (k >= 1) dist_series.emplace_back(k, dist_x);
    energy_series.emplace_back(k, energy);

    if (csv) {
      std::string row;
      row.reserve(256);
      for (const std::string& cell :
           {std::to_string(k), fmt17(rec.step.tau), fmt17(rec.step.sigma), fmt17(rec.step.theta),
            fmt17(dist_x), fmt17(dist_y), fmt17(energy), fmt17(ne), fmt17(slack), fmt17(bound),
            fmt17(rec.primal_residual), fmt17(rec.dual_residual)}) {
        if (!row.empty()) row += ',';
        row += cell;
      }
      if ((k - sched.k_start()) % config.record_every == 0) {
        *csv << row << "\n";
        last_written = k;
      } else {
        pending_row = std::move(row);
      }
    }
    last_k = k;
  };

  RunOptions opts{config.budget, config.tol, config.budget};
  const Trajectory traj = run(problem, sched, start, opts, observer);
  if (csv && last_written != last_k && !pending_row.empty()) *csv << pending_row << "\n";

  ExperimentResult result;
  result.steps = traj.steps;

  ordered_json checks_json = ordered_json::object();
  auto add = [&](Check c, CheckStatus st, std::string detail) {
    checks_json[std::string(to_string(c))] = {{"status", std::string(to_string(st))},
                                               {"detail", detail}};
    result.checks.push_back({c, st, std::move(detail)});
  };
  auto wants = [&](Check c) {
    return std::find(config.checks.begin(), config.checks.end(), c) != config.checks.end();
  };

  if (wants(Check::lemma)) {
    if (!ctx.lemma) {
      add(Check::lemma, CheckStatus::skipped,
          "no descent lemma matches regime " + std::string(to_string(regime)) +
              " on this instance (mu = " + fmt17(problem.mu()) +
              ", gamma = " + fmt17(problem.gamma()) + ")");
    } else {
      add(Check::lemma, lemma_ok ? CheckStatus::pass : CheckStatus::fail,
          std::string(to_string(*ctx.lemma)) +
              " lemma, worst normalized slack " + fmt17(worst_slack));
    }
  }

  if (wants(Check::theorem)) {
    if (regime == Regime::fixed) {
      add(Check::theorem, CheckStatus::skipped, "the fixed regime has no rate theorem");
    } else if (!theorem.applicable) {
      add(Check::theorem, CheckStatus::skipped, "run ended before the bound applies");
    } else {
      add(Check::theorem, theorem.violations == 0 ? CheckStatus::pass : CheckStatus::fail,
          std::to_string(theorem.compared) + " comparisons, " +
              std::to_string(theorem.violations) + " violations, worst measured/bound " +
              fmt17(theorem.worst_ratio));
    }
  }

  ordered_json fit_json = nullptr;
  std::optional<ContractionSummary> contraction;
  if (regime == Regime::optimal_ss || regime == Regime::fixed) {
    try {
      contraction = contraction_factors(energy_series);
      result.max_contraction = contraction->max_ratio;
    } catch (const RateFitError&) {
    }
  }
  if (wants(Check::rate_fit)) {
    Series truncated;
    for (const auto& p : dist_series) {
      if (p.second < kContractionFloor) break;
      truncated.push_back(p);
    }
    RateWindow window = default_rate_window(k0.value_or(1));
    std::string fit_note;
    try {
      const RateFit fit = fit_rate(truncated, window, "dist_x_sq");
      result.slope_dist_x = fit.slope;
      result.fit_residual = fit.residual;
      fit_json = {{"series", fit.name}, {"slope", fit.slope},   {"intercept", fit.intercept},
                  {"k_lo", fit.k_lo},   {"k_hi", fit.k_hi},     {"residual", fit.residual},
                  {"points", fit.points}};
      fit_note = "slope " + fmt17(fit.slope) + " over " + std::to_string(fit.points) + " points";
    } catch (const RateFitError& e) {
      fit_note = e.what();
    }
    if (regime == Regime::optimal_ss) {
      const double rho = linear_rate_rho(sched.s(), ctx.f_norm, sched.mu(), sched.gamma());
      if (!contraction) {
        add(Check::rate_fit, CheckStatus::skipped, "energy series too short for contraction factors");
      } else {
        const bool ok = contraction->max_ratio <= rho + kContractionSlack;
        add(Check::rate_fit, ok ? CheckStatus::pass : CheckStatus::fail,
            "max contraction " + fmt17(contraction->max_ratio) + " vs rho " + fmt17(rho) + "; " +
                fit_note);
      }
    } else {
      add(Check::rate_fit, result.slope_dist_x ? CheckStatus::pass : CheckStatus::skipped,
          fit_note);
    }
  }

  ordered_json ode_json = nullptr;
  if (wants(Check::ode_compare)) {
    if (regime != Regime::fixed && regime != Regime::optimal_ss) {
      add(Check::ode_compare, CheckStatus::skipped,
          "the ODE comparison needs constant steps (fixed or optimal_ss)");
    } else if (!problem.has_gradients()) {
      add(Check::ode_compare, CheckStatus::skipped, "instance has no gradient oracles");
    } else {
      const double tau_over_s = sched.at(0).tau / sched.s();
      ode_json = ordered_json::array();
      std::vector<double> gaps;
      for (double scale : kOdeStepScales) {
        const DiscreteContinuousGap g =
            discrete_continuous_gap(problem, start, scale / ctx.f_norm, tau_over_s, kOdeHorizon);
        gaps.push_back(g.sup_distance);
        ode_json.push_back({{"s", g.s}, {"sup_distance", g.sup_distance}});
      }
      bool ok = true;
      std::string detail = "halving ratios";
      for (size_t i = 0; i + 1 < gaps.size(); ++i) {
        const double ratio = gaps[i + 1] / gaps[i];
        ok = ok && ratio <= kOdeHalvingRatio;
        detail += " " + fmt17(ratio);
      }
      add(Check::ode_compare, ok ? CheckStatus::pass : CheckStatus::fail, detail);
    }
  }

  const PrimalDualPair fin = traj.final_pair();
  ordered_json summary;
  summary["config"] = to_json(config);
  ordered_json resolved;
  resolved["f_norm"] = ctx.f_norm;
  resolved["mu"] = problem.mu();
  resolved["gamma"] = problem.gamma();
  resolved["s"] = sched.s();
  resolved["admissibility_margin"] = check_admissibility(sched.s(), ctx.f_norm).margin;
  if (config.c) resolved["c"] = *config.c;
  if (regime == Regime::fixed || regime == Regime::optimal_ss) {
    resolved["tau"] = sched.at(0).tau;
    resolved["sigma"] = sched.at(0).sigma;
  }
  if (k0) resolved["K0"] = *k0;
  if (regime == Regime::varying_sc) {
    resolved["alpha"] = varying_rate_alpha(sched.mu(), sched.c(), sched.s(), ctx.f_norm);
  }
  if (regime == Regime::optimal_ss) {
    resolved["rho"] = linear_rate_rho(sched.s(), ctx.f_norm, sched.mu(), sched.gamma());
  }
  summary["resolved"] = resolved;
  ordered_json ref;
  ref["exact"] = ctx.exact_saddle;
  if (ctx.reference_certificate) {
    ref["certified"] = ctx.reference_certificate->pass;
    ref["r_x"] = ctx.reference_certificate->r_x;
    ref["r_y"] = ctx.reference_certificate->r_y;
  }
  summary["saddle"] = ref;
  summary["run"] = {{"steps", traj.steps},
                    {"termination", std::string(to_string(traj.termination))},
                    {"final_dist_x_sq", (fin.x - ctx.saddle.x).squaredNorm()},
                    {"final_dist_y_sq", (fin.y - ctx.saddle.y).squaredNorm()}};
  summary["rate_fit"] = fit_json;
  summary["max_contraction"] = json_number(result.max_contraction);
  summary["geometric_mean_contraction"] =
      contraction ? json_number(contraction->geometric_mean) : ordered_json(nullptr);
  summary["ode_compare"] = ode_json;
  summary["checks"] = checks_json;
  summary["all_passed"] = result.all_passed();
  result.summary = summary.dump(2) + "\n";
  return result;
}

namespace {

void ensure_parent(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  ensure_parent(p);
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

}  // namespace

ExperimentResult execute(const ExperimentConfig& config, const ExecuteOptions& options) {
  ExperimentResult result;
  if (options.write_trajectory) {
    const std::filesystem::path csv_path = config.output + ".csv";
    ensure_parent(csv_path);
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
    result = execute_to(config, &csv);
    if (!csv) throw std::runtime_error("write failed for " + csv_path.string());
  } else {
    result = execute_to(config, nullptr);
  }
  if (options.write_summary) write_text(config.output + "_summary.json", result.summary);
  return result;
}

std::vector<SweepCell> expand_sweep(const ExperimentConfig& config) {
  if (!config.sweep) throw ConfigError("sweep", "config has no 'sweep' grid");
  const SweepGrid& grid = *config.sweep;
  const bool uses_c = !grid.c.empty() || !grid.c_over_mu.empty();
  if (uses_c && config.regime != Regime::varying_sc && config.regime != Regime::accelerated) {
    throw ConfigError(grid.c.empty() ? "sweep.c_over_mu" : "sweep.c",
                      "regime " + std::string(to_string(config.regime)) + " takes no c");
  }
  std::vector<std::optional<double>> c_values;
  std::vector<std::string> c_labels;
  if (!grid.c.empty()) {
    for (double c : grid.c) c_values.emplace_back(c);
  } else if (!grid.c_over_mu.empty()) {
    const double mu = build_instance(config.instance).problem.mu();
    for (double r : grid.c_over_mu) c_values.emplace_back(r * mu);
  } else {
    c_values.emplace_back(config.c);
  }
  std::vector<double> s_values = grid.s.empty() ? std::vector<double>{config.s} : grid.s;

  std::vector<SweepCell> cells;
  long index = 0;
  for (const auto& c : c_values) {
    for (double s : s_values) {
      ExperimentConfig cell = config;
      cell.sweep.reset();
      cell.output = config.output + "_cell" + std::to_string(index);
      ScheduleInputs in;
      in.s = s;
      in.c = c;
      if (config.regime == Regime::fixed && grid.s.empty()) {
        in.tau = config.tau;
        in.sigma = config.sigma;
      }
      try {
        const Resolved r = resolve(cell.instance, cell.regime, in);
        apply_schedule(cell, r.schedule);
      } catch (const ConfigError& e) {
        throw ConfigError(e.key(), "sweep cell " + std::to_string(index) + " (c = " +
                                       fmt17(c) + ", s = " + fmt17(s) + "): " + e.what());
      }
      cells.push_back({index, std::move(cell)});
      ++index;
    }
  }
  return cells;
}

SweepResult sweep(const ExperimentConfig& config, int jobs) {
  SweepResult out;
  out.cells = expand_sweep(config);
  const size_t n = out.cells.size();
  out.results.resize(n);
  std::vector<std::string> errors(n);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < n; i = next++) {
      try {
        out.results[i] = execute(out.cells[i].config);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream agg;
  agg << "cell,c,s,status,steps,slope_dist_x,fit_residual,max_contraction\n";
  for (size_t i = 0; i < n; ++i) {
    const ExperimentConfig& cc = out.cells[i].config;
    const ExperimentResult& r = out.results[i];
    std::string status;
    if (!errors[i].empty()) {
      status = "ERROR";
      out.exit_code = 1;
    } else {
      status = r.all_passed() ? "PASS" : "FAIL";
      if (!r.all_passed()) out.exit_code = 1;
    }
    agg << i << ',' << fmt17(cc.c) << ',' << fmt17(cc.s) << ',' << status << ',' << r.steps
        << ',' << fmt17(r.slope_dist_x) << ',' << fmt17(r.fit_residual) << ','
        << fmt17(r.max_contraction) << "\n";
  }
  write_text(config.output + "_sweep.csv", agg.str());
  for (size_t i = 0; i < n; ++i) {
    if (!errors[i].empty()) {
      throw std::runtime_error("sweep cell " + std::to_string(i) + " failed: " + errors[i]);
    }
  }
  return out;
}

int sweep_jobs_from_env() {
  const char* v = std::getenv("PDHG_LAB_JOBS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) {
    throw std::invalid_argument(std::string("PDHG_LAB_JOBS must be a positive integer, got '") +
                                v + "'");
  }
  return static_cast<int>(std::min<long>(n, 256));
}

std::string describe(const ExperimentConfig& config) {
  ScheduleInputs in{config.s, config.c, config.tau, config.sigma};
  const Resolved r = resolve(config.instance, config.regime, in);
  const Schedule& sched = r.schedule;
  const SaddleProblem& problem = r.instance.problem;
  std::ostringstream os;
  os << "instance        " << to_string(config.instance.kind) << " seed=" << config.instance.seed
     << " d1=" << problem.primal_dim() << " d2=" << problem.dual_dim() << "\n";
  os << "regime          " << to_string(config.regime) << "\n";
  os << "||F||           " << fmt17(r.f_norm) << "\n";
  os << "mu, gamma       " << fmt17(problem.mu()) << ", " << fmt17(problem.gamma()) << "\n";
  os << "s               " << fmt17(sched.s()) << "\n";
  const Admissibility adm = check_admissibility(sched.s(), r.f_norm);
  os << "admissibility   1 - s||F|| = " << fmt17(adm.margin)
     << (adm.admissible ? "" : "  (not admissible)") << "\n";
  if (config.regime == Regime::fixed || config.regime == Regime::optimal_ss) {
    os << "tau, sigma      " << fmt17(sched.at(0).tau) << ", " << fmt17(sched.at(0).sigma) << "\n";
  }
  if (config.c) os << "c               " << fmt17(*config.c) << "\n";
  if (config.regime == Regime::varying_sc) {
    os << "c interval      (0, " << fmt17(2.0 * sched.mu()) << ")\n";
  } else if (config.regime == Regime::accelerated) {
    os << "c interval      (0, " << fmt17(sched.mu()) << ")\n";
  }
  const std::string na = "n/a";
  os << "K0              "
     << (config.regime == Regime::accelerated ? std::to_string(k0_threshold(sched.mu(), sched.c()))
                                              : na)
     << "\n";
  os << "alpha           "
     << (config.regime == Regime::varying_sc
             ? fmt17(varying_rate_alpha(sched.mu(), sched.c(), sched.s(), r.f_norm))
             : na)
     << "\n";
  const bool doubly = problem.mu() > 0.0 && problem.gamma() > 0.0;
  os << "rho             "
     << (doubly ? fmt17(linear_rate_rho(sched.s(), r.f_norm, problem.mu(), problem.gamma())) : na)
     << "\n";
  const auto lemma = lemma_for(config.regime, problem);
  os << "lemma           " << (lemma ? std::string(to_string(*lemma)) : std::string("none")) << "\n";
  os << "budget          " << config.budget << "  tol " << fmt17(config.tol) << "  record_every "
     << config.record_every << "\n";
  return os.str();
}

}  // namespace pdhg
