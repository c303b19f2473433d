#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "heatdeco/langevin.hpp"
#include "heatdeco/thermo.hpp"

namespace heatdeco {

/// Two closed-time-path branches over one mode set and time grid.
/// difference() is branch1 - branch2, sum() is branch1 + branch2.
class HistoryPair {
 public:
  /// Throws GridMismatchError unless both branches have the same number of
  /// modes, the same k, dt and length per mode, and one weight per mode.
  HistoryPair(std::vector<ModeHistory> branch1, std::vector<ModeHistory> branch2,
              std::vector<double> weights);

  std::size_t mode_count() const { return branch1_.size(); }
  const std::vector<ModeHistory>& branch1() const { return branch1_; }
  const std::vector<ModeHistory>& branch2() const { return branch2_; }
  const std::vector<double>& weights() const { return weights_; }

  double k(std::size_t mode) const { return branch1_[mode].k; }
  double difference(std::size_t mode, std::size_t n) const;
  double sum(std::size_t mode, std::size_t n) const;

  HistoryPair swapped() const;

 private:
  std::vector<ModeHistory> branch1_;
  std::vector<ModeHistory> branch2_;
  std::vector<double> weights_;
};

struct InfluenceValue {
  double dissipative = 0.0;  // real part
  double noise = 0.0;        // imaginary part, >= 0

  std::complex<double> value() const { return {dissipative, noise}; }
};

/// mu_k applied to a history: A_k (d/dt + gamma_k) dT with central
/// differences inside and one-sided differences at the ends.
/// Throws SingularModeError at k = 0 and TooShortHistoryError below 3 samples.
std::vector<double> dissipation_kernel_apply(const MediumParams& params, const ModeHistory& history);

/// Amplitude of nu_k(t, t') = 2 Gamma_k A_k^2 delta(t - t'), equal to 2 T0 A_k.
double noise_kernel_amplitude(const MediumParams& params, double k);

/// Influence action of a history pair, time integrals as left Riemann sums
/// and mode integrals through the pair's weights:
///   Re = 1/2 sum_k w_k sum_n dt [dT]_n A_k (D{dT}_n + gamma_k {dT}_n)
///   Im =     sum_k w_k sum_n dt Gamma_k A_k^2 [dT]_n^2
/// Throws SingularModeError if any mode has k = 0.
InfluenceValue influence_action(const MediumParams& params, const HistoryPair& pair);

/// |A(1,2) + conj(A(2,1))|.
double antisymmetry_residual(const MediumParams& params, const HistoryPair& pair);

/// Checks that the static limit of the dissipative integrand,
/// sum_k w_k A_k gamma_k / 2 ((dT1_k)^2 - (dT2_k)^2), equals the free-energy
/// difference density sum_k w_k (c0 / 2 T0) ((dT1_k)^2 - (dT2_k)^2), both
/// scaled by beta0. Returns the mismatch relative to the summed magnitude of
/// the mode contributions (0 when both vanish).
double static_free_energy_identity(const MediumParams& params, std::span<const double> static1,
                                   std::span<const double> static2, std::span<const ModeSpec> modes);

struct DecoherenceResult {
  std::vector<double> mode_exponents;
  double total_exponent = 0.0;
  double magnitude = 1.0;  // |D|^2 = exp(-total_exponent)
  bool conserved_mode_divergence = false;
};

/// exponent_k = w_k (2 c0^2 / (D0 k^2)) sum_n dt [dT_k]_n^2 and
/// |D|^2 = exp(-sum_k exponent_k). A k = 0 mode with any nonzero branch
/// difference has an infinite exponent; the result is then flagged and the
/// magnitude is 0.
DecoherenceResult decoherence_exponent(const MediumParams& params, const HistoryPair& pair);

struct ScanRow {
  double k = 0.0;
  double exponent = 0.0;
  double magnitude = 1.0;
  bool conserved = false;
};

/// Decoherence of a constant branch difference `amplitude` held for
/// `duration` (sampled with `steps` intervals), one row per k, sorted by k.
/// Throws std::invalid_argument unless amplitude > 0, duration > 0, steps >= 1
/// and all k >= 0.
std::vector<ScanRow> decoherence_scan(const MediumParams& params, std::vector<double> k_values,
                                      double amplitude, double duration, std::size_t steps = 100);

/// True when exponents strictly decrease with k across the (sorted) rows.
bool scan_is_monotone(std::span<const ScanRow> rows);

}  // namespace heatdeco
