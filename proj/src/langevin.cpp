#include "heatdeco/langevin.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "heatdeco/errors.hpp"
#include "heatdeco/parallel.hpp"

namespace heatdeco {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::ExactOu:
      return "exact-ou";
    case Method::EulerMaruyama:
      return "euler-maruyama";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  if (text == "exact-ou") return Method::ExactOu;
  if (text == "euler-maruyama") return Method::EulerMaruyama;
  throw std::invalid_argument("unknown method '" + std::string(text) + "'");
}

std::size_t SimConfig::steps() const {
  return static_cast<std::size_t>(std::floor(t_end / dt * (1.0 + 1e-12)));
}

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0");
  if (!(t_end >= dt) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be >= dt");
  if (!(noise_scale >= 0.0)) throw std::invalid_argument("noise_scale must be >= 0");
  if (const auto* x0 = std::get_if<double>(&initial); x0 && !std::isfinite(*x0)) {
    throw std::invalid_argument("initial amplitude must be finite");
  }
}

void ModeHistory::validate() const {
  if (values.empty()) throw std::invalid_argument("mode history is empty");
  if (!(dt > 0.0)) throw std::invalid_argument("mode history dt must be > 0");
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("mode history contains a non-finite value");
  }
}

NoiseStream make_mode_stream(const MediumParams& params, double k, const SimConfig& cfg,
                             std::uint64_t substream) {
  return NoiseStream(noise_strength(params, k) * cfg.noise_scale, cfg.seed, substream);
}

namespace {

// Coefficients of x' = drift * x + noise * n for one step of size dt.
struct StepCoefficients {
  double drift = 1.0;
  double noise = 0.0;
};

StepCoefficients exact_coefficients(const MediumParams& params, double k, double dt, double gamma_noise) {
  const double rate = relaxation_rate(params, k);
  if (rate == 0.0) return {};
  const double stationary = gamma_noise / rate;
  return {std::exp(-rate * dt), std::sqrt(stationary * -std::expm1(-2.0 * rate * dt))};
}

double initial_value(const MediumParams& params, const SimConfig& cfg, NoiseStream& stream) {
  if (const auto* x0 = std::get_if<double>(&cfg.initial)) return *x0;
  return std::sqrt(equilibrium_mode_variance(params)) * stream.unit_normal();
}

// Advances x through `steps` steps of cfg.method, calling sink(n, x) after
// each step n = 1..steps.
template <class Sink>
double advance(const MediumParams& params, double k, double x, const SimConfig& cfg,
               NoiseStream& stream, std::size_t steps, Sink&& sink) {
  const double dt = cfg.dt;
  if (cfg.method == Method::ExactOu) {
    const auto c = exact_coefficients(params, k, dt, stream.gamma());
    for (std::size_t n = 1; n <= steps; ++n) {
      x = c.drift * x + c.noise * stream.unit_normal();
      sink(n, x);
    }
  } else {
    const double rate = relaxation_rate(params, k);
    const double noise_sd = std::sqrt(2.0 * stream.gamma() / dt);
    for (std::size_t n = 1; n <= steps; ++n) {
      x = x - rate * x * dt + dt * (noise_sd * stream.unit_normal());
      sink(n, x);
    }
  }
  return x;
}

}  // namespace

double step_euler_maruyama(const MediumParams& params, double k, double x, double dt,
                           NoiseStream& stream) {
  const double rate = relaxation_rate(params, k);
  return x - rate * x * dt + dt * draw_noise_increment(stream, dt);
}

double step_exact_ou(const MediumParams& params, double k, double x, double dt, NoiseStream& stream) {
  const auto c = exact_coefficients(params, k, dt, stream.gamma());
  return c.drift * x + c.noise * stream.unit_normal();
}

double deterministic_decay(const MediumParams& params, double k, double x0, double t) {
  return x0 * std::exp(-relaxation_rate(params, k) * t);
}

ModeHistory simulate_mode(const MediumParams& params, double k, const SimConfig& cfg,
                          std::uint64_t substream) {
  cfg.validate();
  const std::size_t steps = cfg.steps();
  NoiseStream stream = make_mode_stream(params, k, cfg, substream);

  ModeHistory history;
  history.k = k;
  history.dt = cfg.dt;
  history.values.resize(steps + 1);
  history.values[0] = initial_value(params, cfg, stream);
  advance(params, k, history.values[0], cfg, stream, steps,
          [&](std::size_t n, double x) { history.values[n] = x; });
  return history;
}

std::uint64_t ensemble_substream(std::size_t mode_index, std::size_t trajectory, std::size_t n_traj) {
  return static_cast<std::uint64_t>(mode_index) * n_traj + trajectory;
}

std::vector<ModeHistory> simulate_ensemble(const MediumParams& params, std::span<const ModeSpec> modes,
                                           std::size_t n_traj, const SimConfig& cfg, unsigned threads) {
  if (n_traj < 1) throw std::invalid_argument("an ensemble needs at least one trajectory");
  cfg.validate();
  return parallel_map(modes.size() * n_traj, threads, [&](std::size_t index) {
    const std::size_t mode = index / n_traj;
    const std::size_t traj = index % n_traj;
    return simulate_mode(params, modes[mode].k(), cfg, ensemble_substream(mode, traj, n_traj));
  });
}

double default_burn_in(const MediumParams& params, double k) {
  const double rate = relaxation_rate(params, k);
  return rate > 0.0 ? 10.0 / rate : 0.0;
}

std::vector<double> stationary_samples(const MediumParams& params, double k, const SimConfig& cfg,
                                       std::size_t n_samples, double burn_in, unsigned threads,
                                       std::uint64_t first_substream) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(burn_in >= 0.0)) throw std::invalid_argument("burn-in must be >= 0");
  const auto steps = static_cast<std::size_t>(std::ceil(burn_in / cfg.dt * (1.0 - 1e-12)));
  return parallel_map(n_samples, threads, [&](std::size_t i) {
    NoiseStream stream = make_mode_stream(params, k, cfg, first_substream + i);
    const double x0 = initial_value(params, cfg, stream);
    return advance(params, k, x0, cfg, stream, steps, [](std::size_t, double) {});
  });
}

std::vector<double> drift_residual(const MediumParams& params, const ModeHistory& history) {
  const auto& x = history.values;
  const std::size_t n = x.size();
  if (n < 3) throw TooShortHistoryError("drift residual needs at least 3 samples");
  const double rate = relaxation_rate(params, history.k);
  const double dt = history.dt;

  std::vector<double> out(n);
  out[0] = (x[1] - x[0]) / dt + rate * x[0];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] = (x[i + 1] - x[i - 1]) / (2.0 * dt) + rate * x[i];
  }
  out[n - 1] = (x[n - 1] - x[n - 2]) / dt + rate * x[n - 1];
  return out;
}

}  // namespace heatdeco
