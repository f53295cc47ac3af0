#include "pdhg/rates.hpp"

#include <algorithm>
#include <cmath>

namespace pdhg {

RateFit fit_rate(const Series& series, RateWindow window, std::string name) {
  if (window.k_lo >= window.k_hi) {
    throw RateFitError("fit_rate: window needs k_lo < k_hi");
  }
  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& [k, v] : series) {
    if (k < window.k_lo || k > window.k_hi) continue;
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw RateFitError("fit_rate: nonpositive value " + std::to_string(v) + " at k = " +
                         std::to_string(k));
    }
    if (k <= 0) throw RateFitError("fit_rate: k must be positive inside the window");
    lx.push_back(std::log(static_cast<double>(k)));
    ly.push_back(std::log(v));
  }
  const auto n = static_cast<long>(lx.size());
  if (n < 10) {
    throw RateFitError("fit_rate: only " + std::to_string(n) +
                       " points in the window, need at least 10");
  }
  double mx = 0.0;
  double my = 0.0;
  for (long i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (long i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw RateFitError("fit_rate: all samples share one k");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (long i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.k_lo = window.k_lo;
  fit.k_hi = window.k_hi;
  fit.name = std::move(name);
  fit.points = n;
  return fit;
}

RateWindow default_rate_window(long k0) {
  return {std::max<long>(100, 10 * k0), 10000};
}

ContractionSummary contraction_factors(const Series& energies) {
  if (energies.empty()) throw RateFitError("contraction_factors: empty series");
  std::vector<double> values;
  for (const auto& [k, e] : energies) {
    if (!(e >= 0.0)) {
      throw RateFitError("contraction_factors: negative energy at k = " + std::to_string(k));
    }
    if (e < kContractionFloor) break;
    values.push_back(e);
  }
  if (values.size() < 2) {
    throw RateFitError("contraction_factors: need two energies above the floor");
  }
  ContractionSummary out;
  double log_sum = 0.0;
  for (size_t i = 0; i + 1 < values.size(); ++i) {
    const double r = values[i + 1] / values[i];
    out.ratios.push_back(r);
    out.max_ratio = std::max(out.max_ratio, r);
    log_sum += std::log(r);
  }
  out.geometric_mean = std::exp(log_sum / static_cast<double>(out.ratios.size()));
  return out;
}

}  // namespace pdhg
