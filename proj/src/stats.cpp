#include "heatdeco/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "heatdeco/errors.hpp"

namespace heatdeco {

double EnsembleStats::stderr_mean() const {
  return std::sqrt(variance / static_cast<double>(n));
}

EnsembleStats sample_variance(std::span<const double> values) {
  if (values.size() < 2) throw TooFewSamplesError("variance needs at least two samples");
  const auto n = static_cast<double>(values.size());

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;

  // Two-pass with the compensating term of Chan, Golub and LeVeque.
  double squares = 0.0;
  double residual = 0.0;
  for (double v : values) {
    const double d = v - mean;
    squares += d * d;
    residual += d;
  }
  const double variance = (squares - residual * residual / n) / (n - 1.0);

  EnsembleStats stats;
  stats.mean = mean;
  stats.variance = std::max(variance, 0.0);
  stats.stderr_variance = stats.variance * std::sqrt(2.0 / (n - 1.0));
  stats.n = values.size();
  return stats;
}

AcfEstimate autocorrelation(std::span<const double> values, double dt, std::size_t max_lag) {
  const std::size_t n = values.size();
  if (max_lag >= n) {
    throw LagRangeError("max_lag " + std::to_string(max_lag) + " must be below the history length " +
                        std::to_string(n));
  }
  double zero_lag = 0.0;
  for (double v : values) zero_lag += v * v;
  if (zero_lag == 0.0) throw std::invalid_argument("autocorrelation of an all-zero series is undefined");

  AcfEstimate acf;
  acf.lags.resize(max_lag + 1);
  acf.values.resize(max_lag + 1);
  acf.lags[0] = 0.0;
  acf.values[0] = 1.0;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    double sum = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) sum += values[i] * values[i + lag];
    acf.lags[lag] = static_cast<double>(lag) * dt;
    acf.values[lag] = sum / zero_lag;
  }
  return acf;
}

AcfEstimate autocorrelation(const ModeHistory& history, std::size_t max_lag) {
  return autocorrelation(history.values, history.dt, max_lag);
}

double fit_exponential_rate(const AcfEstimate& acf, double threshold) {
  // Weighted least squares of -log(acf) against lag time through the origin, weight acf^2 / t^2
  // (inverse of the small-lag variance of log acf). Equivalent to averaging the per-lag rates
  // -log(acf)/t with weights acf^2.
  double weight_sum = 0.0;
  double rate_sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < acf.values.size() && acf.values[i] > threshold; ++i) {
    ++used;
    const double t = acf.lags[i];
    if (t == 0.0) continue;
    const double w = acf.values[i] * acf.values[i];
    weight_sum += w;
    rate_sum += w * (-std::log(acf.values[i]) / t);
  }
  if (used < 3 || weight_sum == 0.0) {
    throw InsufficientWindowError("only " + std::to_string(used) + " lags have acf above " +
                                  std::to_string(threshold) + "; at least 3 are required");
  }
  return rate_sum / weight_sum;
}

}  // namespace heatdeco
