#include "heatdeco/influence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "heatdeco/errors.hpp"

namespace heatdeco {

namespace {

// d/dt of samples on a uniform grid: central inside, one-sided at the ends.
double time_derivative(const std::vector<double>& x, std::size_t n, double dt) {
  const std::size_t last = x.size() - 1;
  if (n == 0) return (x[1] - x[0]) / dt;
  if (n == last) return (x[last] - x[last - 1]) / dt;
  return (x[n + 1] - x[n - 1]) / (2.0 * dt);
}

// Left Riemann sum of dt * diff^2 over a mode, the common factor of the
// noise action and the decoherence exponent.
double squared_difference_integral(const HistoryPair& pair, std::size_t mode) {
  const auto& h = pair.branch1()[mode];
  double sum = 0.0;
  for (std::size_t n = 0; n + 1 < h.size(); ++n) {
    const double d = pair.difference(mode, n);
    sum += h.dt * d * d;
  }
  return sum;
}

}  // namespace

HistoryPair::HistoryPair(std::vector<ModeHistory> branch1, std::vector<ModeHistory> branch2,
                         std::vector<double> weights)
    : branch1_(std::move(branch1)), branch2_(std::move(branch2)), weights_(std::move(weights)) {
  if (branch1_.size() != branch2_.size()) throw GridMismatchError("branches have different mode counts");
  if (weights_.size() != branch1_.size()) throw GridMismatchError("one weight per mode is required");
  for (std::size_t j = 0; j < branch1_.size(); ++j) {
    const auto& a = branch1_[j];
    const auto& b = branch2_[j];
    a.validate();
    b.validate();
    if (a.k != b.k || a.dt != b.dt || a.size() != b.size()) {
      throw GridMismatchError("branches differ in k, dt or length at mode " + std::to_string(j));
    }
    if (!(weights_[j] > 0.0) || !std::isfinite(weights_[j])) {
      throw std::invalid_argument("mode weights must be positive");
    }
  }
}

double HistoryPair::difference(std::size_t mode, std::size_t n) const {
  return branch1_[mode].values[n] - branch2_[mode].values[n];
}

double HistoryPair::sum(std::size_t mode, std::size_t n) const {
  return branch1_[mode].values[n] + branch2_[mode].values[n];
}

HistoryPair HistoryPair::swapped() const {
  return HistoryPair(branch2_, branch1_, weights_);
}

std::vector<double> dissipation_kernel_apply(const MediumParams& params, const ModeHistory& history) {
  const double coupling = coupling_constant(params, history.k);
  if (history.size() < 3) throw TooShortHistoryError("dissipation kernel needs at least 3 samples");
  const double rate = relaxation_rate(params, history.k);

  std::vector<double> out(history.size());
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = coupling * (time_derivative(history.values, n, history.dt) + rate * history.values[n]);
  }
  return out;
}

double noise_kernel_amplitude(const MediumParams& params, double k) {
  const double coupling = coupling_constant(params, k);
  return 2.0 * noise_strength(params, k) * coupling * coupling;
}

InfluenceValue influence_action(const MediumParams& params, const HistoryPair& pair) {
  InfluenceValue action;
  for (std::size_t j = 0; j < pair.mode_count(); ++j) {
    const double k = pair.k(j);
    const double coupling = coupling_constant(params, k);
    const double rate = relaxation_rate(params, k);
    const double gamma = noise_strength(params, k);
    const auto& h = pair.branch1()[j];
    if (h.size() < 2) throw TooShortHistoryError("influence action needs at least 2 samples per mode");

    std::vector<double> sum(h.size());
    for (std::size_t n = 0; n < h.size(); ++n) sum[n] = pair.sum(j, n);

    double dissipative = 0.0;
    for (std::size_t n = 0; n + 1 < h.size(); ++n) {
      dissipative += h.dt * pair.difference(j, n) * coupling * (time_derivative(sum, n, h.dt) + rate * sum[n]);
    }
    const double w = pair.weights()[j];
    action.dissipative += 0.5 * w * dissipative;
    action.noise += w * gamma * coupling * coupling * squared_difference_integral(pair, j);
  }
  return action;
}

double antisymmetry_residual(const MediumParams& params, const HistoryPair& pair) {
  const auto forward = influence_action(params, pair).value();
  const auto backward = influence_action(params, pair.swapped()).value();
  return std::abs(forward + std::conj(backward));
}

double static_free_energy_identity(const MediumParams& params, std::span<const double> static1,
                                   std::span<const double> static2, std::span<const ModeSpec> modes) {
  if (static1.size() != modes.size() || static2.size() != modes.size()) {
    throw GridMismatchError("one static amplitude per mode is required on each branch");
  }
  const double density = params.c0() / (2.0 * params.T0());
  double dissipative = 0.0;
  double free_energy = 0.0;
  double dissipative_abs = 0.0;
  double free_energy_abs = 0.0;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const double k = modes[j].k();
    const double split = static1[j] * static1[j] - static2[j] * static2[j];
    const double d = modes[j].weight() * 0.5 * coupling_constant(params, k) * relaxation_rate(params, k) * split;
    const double f = modes[j].weight() * density * split;
    dissipative += d;
    free_energy += f;
    dissipative_abs += std::abs(d);
    free_energy_abs += std::abs(f);
  }
  dissipative *= params.beta0();
  free_energy *= params.beta0();
  // Mode contributions of opposite sign can cancel, so the mismatch is measured against their total size.
  const double scale = params.beta0() * std::max(dissipative_abs, free_energy_abs);
  return scale == 0.0 ? 0.0 : std::abs(dissipative - free_energy) / scale;
}

DecoherenceResult decoherence_exponent(const MediumParams& params, const HistoryPair& pair) {
  DecoherenceResult result;
  result.mode_exponents.resize(pair.mode_count());
  for (std::size_t j = 0; j < pair.mode_count(); ++j) {
    const double k = pair.k(j);
    const double integral = squared_difference_integral(pair, j);
    if (k == 0.0) {
      bool differs = false;
      for (std::size_t n = 0; n < pair.branch1()[j].size(); ++n) differs = differs || pair.difference(j, n) != 0.0;
      if (differs) {
        result.mode_exponents[j] = std::numeric_limits<double>::infinity();
        result.conserved_mode_divergence = true;
      }
      continue;
    }
    const double coefficient = 2.0 * params.c0() * params.c0() / (params.D0() * k * k);
    result.mode_exponents[j] = pair.weights()[j] * (coefficient * integral);
  }
  for (double e : result.mode_exponents) result.total_exponent += e;
  result.magnitude = std::exp(-result.total_exponent);
  return result;
}

std::vector<ScanRow> decoherence_scan(const MediumParams& params, std::vector<double> k_values,
                                      double amplitude, double duration, std::size_t steps) {
  if (!(amplitude > 0.0)) throw std::invalid_argument("scan amplitude must be > 0");
  if (!(duration > 0.0)) throw std::invalid_argument("scan duration must be > 0");
  if (steps < 1) throw std::invalid_argument("scan needs at least one time step");
  for (double k : k_values) {
    if (!(k >= 0.0) || !std::isfinite(k)) throw std::invalid_argument("scan wavenumbers must be >= 0");
  }
  std::sort(k_values.begin(), k_values.end());

  const double dt = duration / static_cast<double>(steps);
  std::vector<ScanRow> rows;
  rows.reserve(k_values.size());
  for (double k : k_values) {
    ModeHistory held{k, dt, std::vector<double>(steps + 1, amplitude)};
    ModeHistory rest{k, dt, std::vector<double>(steps + 1, 0.0)};
    const HistoryPair pair({std::move(held)}, {std::move(rest)}, {1.0});
    const auto deco = decoherence_exponent(params, pair);
    rows.push_back({k, deco.total_exponent, deco.magnitude, deco.conserved_mode_divergence});
  }
  return rows;
}

bool scan_is_monotone(std::span<const ScanRow> rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i - 1].k < rows[i].k) || !(rows[i - 1].exponent > rows[i].exponent)) return false;
  }
  return true;
}

}  // namespace heatdeco
