#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "heatdeco/langevin.hpp"

namespace heatdeco {

struct EnsembleStats {
  double mean = 0.0;
  double variance = 0.0;         // unbiased, divides by n - 1
  double stderr_variance = 0.0;  // variance * sqrt(2 / (n - 1)), Gaussian data
  std::size_t n = 0;

  double stderr_mean() const;
};

/// Throws TooFewSamplesError for fewer than two values.
EnsembleStats sample_variance(std::span<const double> values);

struct AcfEstimate {
  std::vector<double> lags;    // lag times, multiples of dt
  std::vector<double> values;  // values[0] == 1
};

/// Normalized autocorrelation with the biased (divide-by-N) estimator,
/// r(l) = sum_{n < N-l} x_n x_{n+l} / sum_n x_n^2. The data are not
/// mean-subtracted; the processes here have zero mean.
/// Throws LagRangeError unless max_lag < values.size(), and
/// std::invalid_argument for an all-zero series.
AcfEstimate autocorrelation(std::span<const double> values, double dt, std::size_t max_lag);
AcfEstimate autocorrelation(const ModeHistory& history, std::size_t max_lag);

/// Decay rate from a weighted least-squares fit of -log(acf) = rate * lag
/// through the origin (weights acf^2 / lag^2), over the leading lags whose acf
/// exceeds `threshold`. The window
/// stops at the first lag at or below the threshold. Throws
/// InsufficientWindowError when it holds fewer than three lags.
double fit_exponential_rate(const AcfEstimate& acf, double threshold = 0.1);

}  // namespace heatdeco
