#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pdhg {

/// (k, value) samples of a convergence series.
using Series = std::vector<std::pair<long, double>>;

struct RateWindow {
  long k_lo;
  long k_hi;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  long k_lo = 0;
  long k_hi = 0;
  /// Root-mean-square residual of the log-log least-squares fit.
  double residual = 0.0;
  std::string name;
  long points = 0;
};

class RateFitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ordinary least squares of ln v against ln k over the samples with
/// window.k_lo <= k <= window.k_hi. Needs at least 10 samples in the window,
/// all strictly positive.
RateFit fit_rate(const Series& series, RateWindow window, std::string name = {});

/// [max(100, 10 K0), 10^4].
RateWindow default_rate_window(long k0 = 1);

inline constexpr double kContractionFloor = 1e-24;

struct ContractionSummary {
  std::vector<double> ratios;  // E_{k+1} / E_k
  double max_ratio = 0.0;
  double geometric_mean = 0.0;
};

/// Per-step ratios of a positive energy series. The series is cut at the
/// first value below kContractionFloor; at least two values must remain.
ContractionSummary contraction_factors(const Series& energies);

}  // namespace pdhg
