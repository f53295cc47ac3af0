#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pdhg/schedule.hpp"
#include "pdhg/zoo.hpp"

namespace pdhg {

enum class Check { lemma, theorem, rate_fit, ode_compare };
std::string_view to_string(Check check);
Check check_from_string(std::string_view name);

struct SweepGrid {
  /// Absolute values of c, or multiples of mu; at most one of the two is used.
  std::vector<double> c;
  std::vector<double> c_over_mu;
  std::vector<double> s;

  bool operator==(const SweepGrid&) const = default;
};

/// A resolved experiment. After parse_config every schedule constant the
/// regime uses is present: s always, c for varying_sc / accelerated, tau and
/// sigma for fixed.
struct ExperimentConfig {
  InstanceSpec instance;
  Regime regime = Regime::fixed;
  double s = 0.0;
  std::optional<double> c;
  std::optional<double> tau;
  std::optional<double> sigma;
  long budget = 1000;
  double tol = 1e-10;
  long record_every = 1;
  std::vector<Check> checks;
  std::string output = "pdhg_run";
  std::optional<SweepGrid> sweep;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Rejected configuration; key() is the dotted path of the offending entry
/// (e.g. "momentum", "instance.mu", "schedule.c").
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Parses a JSON config, fills defaults and validates the schedule against the
/// instance. The grammar is documented in the README.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// JSON text that parse_config maps back to an equal config.
std::string serialize(const ExperimentConfig& config);

enum class CheckStatus { pass, fail, skipped };
std::string_view to_string(CheckStatus status);

struct CheckResult {
  Check check;
  CheckStatus status;
  std::string detail;
};

struct ExperimentResult {
  std::vector<CheckResult> checks;
  /// JSON summary with a stable key order.
  std::string summary;
  std::optional<double> slope_dist_x;
  std::optional<double> fit_residual;
  std::optional<double> max_contraction;
  long steps = 0;

  bool all_passed() const;
  int exit_code() const { return all_passed() ? 0 : 1; }
};

struct ExecuteOptions {
  /// Write <output>.csv; verify turns this off.
  bool write_trajectory = true;
  /// Write <output>_summary.json.
  bool write_summary = true;
};

/// Runs the configured regime, writes the artifacts and evaluates the checks.
/// Throws std::runtime_error on I/O failure.
ExperimentResult execute(const ExperimentConfig& config, const ExecuteOptions& options = {});

/// Same as execute but streams the trajectory CSV to `csv` (when non-null).
ExperimentResult execute_to(const ExperimentConfig& config, std::ostream* csv);

struct SweepCell {
  long index;
  ExperimentConfig config;
};

/// Expands the grid of `config.sweep` into validated cells. Throws ConfigError
/// identifying the first invalid cell.
std::vector<SweepCell> expand_sweep(const ExperimentConfig& config);

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<ExperimentResult> results;
  int exit_code = 0;
};

/// Runs every cell with up to `jobs` threads; cell i writes <output>_cell<i>.*
/// and the aggregate goes to <output>_sweep.csv.
SweepResult sweep(const ExperimentConfig& config, int jobs);

/// Parallelism for sweep from PDHG_LAB_JOBS (default 1).
int sweep_jobs_from_env();

/// Human-readable resolved defaults, admissibility margin, K0, alpha, rho.
std::string describe(const ExperimentConfig& config);

inline constexpr const char* kCsvHeader =
    "k,tau_k,sigma_k,theta_k,dist_x_sq,dist_y_sq,lyapunov,ne,lemma_slack,theorem_bound,"
    "primal_residual,dual_residual";

}  // namespace pdhg
