#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "heatdeco/noise.hpp"
#include "heatdeco/thermo.hpp"

namespace heatdeco {

enum class Method { ExactOu, EulerMaruyama };

std::string_view to_string(Method method);
/// Accepts "exact-ou" and "euler-maruyama".
Method parse_method(std::string_view text);

/// Start each trajectory from a draw with variance T0^2/c0.
struct SampleEquilibrium {};

using InitialCondition = std::variant<double, SampleEquilibrium>;

struct SimConfig {
  double dt = 0.01;
  double t_end = 1.0;
  Method method = Method::ExactOu;
  std::uint64_t seed = 0;
  InitialCondition initial = 0.0;
  // Multiplies Gamma_k. 0 gives the deterministic limit; anything other than
  // 0 or 1 breaks the fluctuation-dissipation relation and exists so the
  // verification tools can be shown to catch it.
  double noise_scale = 1.0;

  /// floor(t_end / dt), guarded against round-off when t_end is a multiple of dt.
  std::size_t steps() const;
  /// Throws std::invalid_argument on dt <= 0, t_end < dt or negative noise_scale.
  void validate() const;
};

/// Samples dT_k(n dt), n = 0..N.
struct ModeHistory {
  double k = 0.0;
  double dt = 0.0;
  std::vector<double> values;

  double time(std::size_t n) const { return static_cast<double>(n) * dt; }
  std::size_t size() const { return values.size(); }
  /// Throws std::invalid_argument if empty, dt <= 0 or any value non-finite.
  void validate() const;
};

/// The stream that drives mode k under `cfg`: Gamma_k * noise_scale on the
/// given substream of cfg.seed.
NoiseStream make_mode_stream(const MediumParams& params, double k, const SimConfig& cfg,
                             std::uint64_t substream);

/// x - gamma_k x dt + dt * xi, xi drawn by draw_noise_increment. Stable only
/// for gamma_k dt < 1, which is not enforced.
double step_euler_maruyama(const MediumParams& params, double k, double x, double dt,
                           NoiseStream& stream);

/// Exact transition of the linear Langevin equation:
/// e^{-gamma dt} x + sigma sqrt(1 - e^{-2 gamma dt}) n with sigma^2 = Gamma/gamma,
/// where Gamma is the stream's strength (T0^2/c0 for an unscaled stream).
/// Returns x unchanged for k = 0. Consumes exactly one normal per call.
double step_exact_ou(const MediumParams& params, double k, double x, double dt,
                     NoiseStream& stream);

/// x0 e^{-gamma_k t}, the zero-noise solution.
double deterministic_decay(const MediumParams& params, double k, double x0, double t);

/// One trajectory on substream `substream` of cfg.seed. Bitwise deterministic
/// in (params, k, cfg, substream).
ModeHistory simulate_mode(const MediumParams& params, double k, const SimConfig& cfg,
                          std::uint64_t substream = 0);

/// Substream used by trajectory `trajectory` of mode `mode_index` in an
/// ensemble of n_traj trajectories per mode: mode_index * n_traj + trajectory.
std::uint64_t ensemble_substream(std::size_t mode_index, std::size_t trajectory, std::size_t n_traj);

/// Runs n_traj trajectories for every mode. Result is ordered mode-major:
/// out[j * n_traj + i] is trajectory i of modes[j]. Output does not depend on
/// the worker count (0 = hardware concurrency).
std::vector<ModeHistory> simulate_ensemble(const MediumParams& params, std::span<const ModeSpec> modes,
                                           std::size_t n_traj, const SimConfig& cfg,
                                           unsigned threads = 0);

/// Default burn-in of 10 relaxation times, 10 / gamma_k. Zero for k = 0.
double default_burn_in(const MediumParams& params, double k);

/// n_samples independent draws of the state at time `burn_in`, each from its
/// own trajectory started at cfg.initial; sample i uses substream
/// first_substream + i. Only the final state is kept, so memory stays
/// O(n_samples).
std::vector<double> stationary_samples(const MediumParams& params, double k, const SimConfig& cfg,
                                       std::size_t n_samples, double burn_in, unsigned threads = 0,
                                       std::uint64_t first_substream = 0);

/// Pointwise d/dt dT + gamma_k dT along a history: central differences in
/// the interior, one-sided at the endpoints. This is the drift operator of
/// the Langevin equation; it vanishes on deterministic_decay up to O(dt^2).
std::vector<double> drift_residual(const MediumParams& params, const ModeHistory& history);

}  // namespace heatdeco
