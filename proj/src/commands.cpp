#include "heatdeco/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "heatdeco/errors.hpp"
#include "heatdeco/field.hpp"
#include "heatdeco/influence.hpp"
#include "heatdeco/parallel.hpp"
#include "heatdeco/stats.hpp"
#include "heatdeco/version.hpp"

namespace heatdeco {

namespace {

using Json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parseval is an exact identity of the transform pair; anything above this
// is a defect, not noise.
constexpr double kParsevalTolerance = 1e-12;

Json provenance(const RunConfig& config) {
  Json resolved = Json::object();
  for (const auto& [key, value] : config.resolved()) resolved[key] = value;
  return Json{{"version", kVersion}, {"config", resolved}};
}

std::string csv_preamble(const RunConfig& config) {
  std::string out = "# ";
  out += kVersion;
  out += '\n';
  for (const auto& [key, value] : config.resolved()) out += "# " + key + "=" + value + "\n";
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << contents;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  write_file(path, doc.dump(2) + "\n");
}

Json stats_json(const EnsembleStats& s) {
  return Json{{"mean", s.mean}, {"variance", s.variance}, {"stderr_variance", s.stderr_variance}, {"n", s.n}};
}

double burn_in_for(const RunConfig& config, const MediumParams& params, double k) {
  return config.burn_in.value_or(default_burn_in(params, k));
}

std::size_t steps_for(double time, double dt) {
  return static_cast<std::size_t>(std::ceil(time / dt * (1.0 - 1e-12)));
}

// Decay rate from the ACF of a stationary series; nullopt when the window is
// too short or the series is degenerate.
std::optional<double> fitted_rate(std::span<const double> series, double dt, double rate) {
  if (series.size() < 4 || rate <= 0.0) return std::nullopt;
  const auto wanted = static_cast<std::size_t>(std::ceil(4.0 / (rate * dt)));
  const std::size_t max_lag = std::min(series.size() - 1, std::max<std::size_t>(wanted, 3));
  try {
    return fit_exponential_rate(autocorrelation(series, dt, max_lag));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

Json optional_number(std::optional<double> v) {
  return v ? Json(*v) : Json(nullptr);
}

template <class Body>
int guarded(const char* name, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << name << ": configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const IoError& e) {
    std::cerr << name << ": I/O error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << name << ": internal error: " << e.what() << '\n';
    return kExitInternalError;
  }
}

struct TrajectoryOutput {
  std::vector<double> thinned;
  std::vector<double> history;  // kept for trajectory 0 only
};

void write_trajectory(const RunConfig& config, std::size_t mode_index, const ModeHistory& history) {
  const auto stem = "trajectory_" + std::to_string(mode_index);
  if (config.format == OutputFormat::Json) {
    Json doc = provenance(config);
    doc["k"] = history.k;
    doc["dt"] = history.dt;
    Json t = Json::array();
    Json x = Json::array();
    for (std::size_t n = 0; n < history.size(); ++n) {
      t.push_back(history.time(n));
      x.push_back(history.values[n]);
    }
    doc["t"] = std::move(t);
    doc["delta_T"] = std::move(x);
    write_json(config.out / (stem + ".json"), doc);
    return;
  }
  std::string text = csv_preamble(config);
  text += "# k=" + format_double(history.k) + "\n";
  text += "t,delta_T\n";
  for (std::size_t n = 0; n < history.size(); ++n) {
    text += format_double(history.time(n));
    text += ',';
    text += format_double(history.values[n]);
    text += '\n';
  }
  write_file(config.out / (stem + ".csv"), text);
}

}  // namespace

int cmd_simulate(const RunConfig& config) {
  return guarded("simulate", [&] {
    config.validate();
    const auto params = config.medium();
    const auto modes = config.modes();
    const auto cfg = config.sim();
    const bool deterministic = config.noise_scale == 0.0;

    Json summary = provenance(config);
    Json mode_reports = Json::array();
    for (std::size_t j = 0; j < modes.size(); ++j) {
      const double k = modes[j].k();
      const double rate = relaxation_rate(params, k);
      const std::size_t burn_steps = steps_for(burn_in_for(config, params, k), cfg.dt);
      const std::size_t stride =
          rate > 0.0 ? std::max<std::size_t>(1, steps_for(config.decorrelation / rate, cfg.dt)) : 1;

      auto runs = parallel_map(config.n_traj, config.threads, [&](std::size_t i) {
        const auto h = simulate_mode(params, k, cfg, ensemble_substream(j, i, config.n_traj));
        TrajectoryOutput out;
        for (std::size_t n = burn_steps; n < h.size(); n += stride) out.thinned.push_back(h.values[n]);
        if (i == 0) out.history = h.values;
        return out;
      });

      const ModeHistory first{k, cfg.dt, std::move(runs[0].history)};
      write_trajectory(config, j, first);

      std::vector<double> pooled;
      for (const auto& run : runs) pooled.insert(pooled.end(), run.thinned.begin(), run.thinned.end());

      Json report{{"k", k},
                  {"weight", modes[j].weight()},
                  {"expected_rate", rate},
                  {"expected_variance", equilibrium_mode_variance(params)},
                  {"burn_in_steps", burn_steps},
                  {"thinning_stride", stride},
                  {"deterministic", deterministic}};
      if (k == 0.0) report["notice"] = "conserved mode: zero relaxation rate and zero noise";

      if (pooled.size() >= 2) {
        const auto stats = sample_variance(pooled);
        report["sample_variance"] = stats_json(stats);
        report["within_3_sigma"] =
            std::abs(stats.variance - equilibrium_mode_variance(params)) <= 3.0 * stats.stderr_variance;
      } else {
        report["sample_variance"] = nullptr;
        report["within_3_sigma"] = nullptr;
      }

      const std::span<const double> tail =
          burn_steps < first.size() ? std::span<const double>(first.values).subspan(burn_steps)
                                    : std::span<const double>{};
      const auto fit = fitted_rate(tail, cfg.dt, rate);
      report["fitted_rate"] = optional_number(fit);
      report["rate_relative_error"] = fit ? Json(std::abs(*fit - rate) / rate) : Json(nullptr);

      if (deterministic && config.x0) {
        double deviation = 0.0;
        for (std::size_t n = 0; n < first.size(); ++n) {
          deviation = std::max(deviation,
                               std::abs(first.values[n] - deterministic_decay(params, k, *config.x0, first.time(n))));
        }
        report["max_decay_deviation"] = deviation;
      }
      mode_reports.push_back(std::move(report));
    }
    summary["modes"] = std::move(mode_reports);
    write_json(config.out / "simulate_summary.json", summary);
    return int{kExitOk};
  });
}

int cmd_fdr_verify(const RunConfig& config) {
  return guarded("fdr-verify", [&] {
    config.validate();
    const auto params = config.medium();
    const auto modes = config.modes();
    const auto cfg = config.sim();
    const double expected_variance = equilibrium_mode_variance(params);
    const std::uint64_t block = config.samples + 1;

    bool all_pass = true;
    Json mode_reports = Json::array();
    for (std::size_t j = 0; j < modes.size(); ++j) {
      const double k = modes[j].k();
      if (k == 0.0) {
        mode_reports.push_back(Json{{"k", k},
                                    {"skipped", true},
                                    {"notice", "conserved mode: zero relaxation rate and zero noise, nothing to test"}});
        std::cout << "fdr-verify: k=0 skipped (conserved mode)\n";
        continue;
      }
      const double rate = relaxation_rate(params, k);
      const double burn_in = burn_in_for(config, params, k);

      const auto samples =
          stationary_samples(params, k, cfg, config.samples, burn_in, config.threads, j * block);
      const auto stats = sample_variance(samples);
      const double z = stats.stderr_variance > 0.0
                           ? std::abs(stats.variance - expected_variance) / stats.stderr_variance
                           : (stats.variance == expected_variance ? 0.0 : INFINITY);
      const bool variance_pass = z <= config.z_threshold;

      SimConfig rate_cfg = cfg;
      rate_cfg.initial = SampleEquilibrium{};
      if (config.rate_dt) {
        rate_cfg.dt = *config.rate_dt;
      } else if (cfg.method == Method::ExactOu) {
        rate_cfg.dt = 0.1 / rate;
      }
      rate_cfg.t_end = static_cast<double>(config.rate_steps) * rate_cfg.dt;
      const auto history = simulate_mode(params, k, rate_cfg, j * block + config.samples);
      const std::size_t burn_steps = std::min(steps_for(burn_in, rate_cfg.dt), history.size());
      const auto fit =
          fitted_rate(std::span<const double>(history.values).subspan(burn_steps), rate_cfg.dt, rate);
      const double rate_error = fit ? std::abs(*fit - rate) / rate : INFINITY;
      const bool rate_pass = fit && rate_error <= config.rate_tolerance;

      all_pass = all_pass && variance_pass && rate_pass;
      std::cout << "fdr-verify: k=" << format_double(k) << " variance " << (variance_pass ? "PASS" : "FAIL")
                << " (z=" << z << "), rate " << (rate_pass ? "PASS" : "FAIL") << " (rel err=" << rate_error
                << ")\n";

      Json tests = Json::array();
      tests.push_back(Json{{"name", "stationary_variance"},
                           {"pass", variance_pass},
                           {"expected", expected_variance},
                           {"stats", stats_json(stats)},
                           {"z", std::isfinite(z) ? Json(z) : Json(nullptr)},
                           {"z_threshold", config.z_threshold}});
      tests.push_back(Json{{"name", "rate_recovery"},
                           {"pass", rate_pass},
                           {"expected", rate},
                           {"fitted", optional_number(fit)},
                           {"relative_error", fit ? Json(rate_error) : Json(nullptr)},
                           {"tolerance", config.rate_tolerance},
                           {"steps", config.rate_steps},
                           {"dt", rate_cfg.dt}});
      mode_reports.push_back(Json{{"k", k}, {"skipped", false}, {"tests", std::move(tests)}});
    }

    Json report = provenance(config);
    report["modes"] = std::move(mode_reports);
    report["all_pass"] = all_pass;
    write_json(config.out / "fdr_report.json", report);
    return all_pass ? int{kExitOk} : int{kExitStatisticalFailure};
  });
}

int cmd_deco_scan(const RunConfig& config) {
  return guarded("deco-scan", [&] {
    config.validate();
    std::vector<double> ks;
    for (const auto& mode : config.modes()) ks.push_back(mode.k());
    const auto rows = decoherence_scan(config.medium(), ks, config.amplitude, config.duration, config.deco_steps);
    if (!scan_is_monotone(rows)) {
      std::cerr << "deco-scan: exponents are not strictly decreasing in k\n";
      return int{kExitInternalError};
    }

    if (config.format == OutputFormat::Json) {
      Json doc = provenance(config);
      Json table = Json::array();
      for (const auto& row : rows) {
        table.push_back(Json{{"k", row.k},
                             {"exponent", std::isfinite(row.exponent) ? Json(row.exponent) : Json("inf")},
                             {"magnitude", row.magnitude},
                             {"conserved_flag", row.conserved}});
      }
      doc["rows"] = std::move(table);
      write_json(config.out / "deco_scan.json", doc);
    } else {
      std::string text = csv_preamble(config);
      text += "k,exponent,magnitude,conserved_flag\n";
      for (const auto& row : rows) {
        text += format_double(row.k) + ',' + format_double(row.exponent) + ',' + format_double(row.magnitude) +
                ',' + (row.conserved ? "true" : "false") + '\n';
      }
      write_file(config.out / "deco_scan.csv", text);
    }
    return int{kExitOk};
  });
}

int cmd_field_sample(const RunConfig& config) {
  return guarded("field-sample", [&] {
    config.validate();
    const auto params = config.medium();
    const auto geometry = config.lattice_geometry();

    struct FieldMeasures {
      double energy = 0.0;
      double free_energy = 0.0;
      double parseval = 0.0;
    };
    const auto draw = [&](std::size_t i) {
      NoiseStream stream(0.0, config.seed, i);
      return sample_equilibrium_field(params, geometry, stream);
    };
    const auto measures = parallel_map(config.n_fields, config.threads, [&](std::size_t i) {
      const auto field = draw(i);
      return FieldMeasures{total_energy_change(params, field), free_energy_change(params, field),
                           parseval_check(field)};
    });

    std::vector<double> energies;
    std::vector<double> free_energies;
    double parseval = 0.0;
    for (const auto& m : measures) {
      energies.push_back(m.energy);
      free_energies.push_back(m.free_energy);
      parseval = std::max(parseval, m.parseval);
    }

    const double volume = geometry.volume();
    const double expected_energy = volume * params.c0() * params.T0() * params.T0();
    const auto energy = sample_variance(energies);
    const double energy_z = std::abs(energy.variance - expected_energy) / energy.stderr_variance;
    const bool energy_pass = energy_z <= config.z_threshold;

    const double expected_free = static_cast<double>(geometry.size()) * params.T0() / 2.0;
    const auto free = sample_variance(free_energies);
    const double free_z = std::abs(free.mean - expected_free) / free.stderr_mean();
    const bool free_pass = free_z <= config.z_threshold;

    const bool parseval_pass = parseval <= kParsevalTolerance;
    const bool all_pass = energy_pass && free_pass && parseval_pass;

    Json doc = provenance(config);
    doc["volume"] = volume;
    doc["sites"] = geometry.size();
    doc["energy_fluctuation"] = Json{{"pass", energy_pass},
                                     {"expected_variance", expected_energy},
                                     {"stats", stats_json(energy)},
                                     {"z", energy_z}};
    doc["equipartition"] = Json{{"pass", free_pass},
                                {"expected_mean", expected_free},
                                {"mean", free.mean},
                                {"stderr_mean", free.stderr_mean()},
                                {"z", free_z}};
    doc["parseval"] = Json{{"pass", parseval_pass}, {"max_residual", parseval}, {"tolerance", kParsevalTolerance}};
    doc["all_pass"] = all_pass;
    write_json(config.out / "field_sample.json", doc);

    const auto field = draw(0);
    const auto& extents = field.extents();
    if (config.format == OutputFormat::Json) {
      Json f = provenance(config);
      f["extents"] = extents;
      f["spacing"] = field.spacing();
      f["delta_T"] = std::vector<double>(field.values().begin(), field.values().end());
      write_json(config.out / "field_sample_0.json", f);
    } else {
      std::string text = csv_preamble(config);
      for (std::size_t axis = 0; axis < extents.size(); ++axis) text += "i" + std::to_string(axis) + ",";
      text += "delta_T\n";
      for (std::size_t flat = 0; flat < field.size(); ++flat) {
        std::vector<std::size_t> index(extents.size());
        std::size_t rest = flat;
        for (std::size_t axis = extents.size(); axis-- > 0;) {
          index[axis] = rest % extents[axis];
          rest /= extents[axis];
        }
        for (auto i : index) text += std::to_string(i) + ",";
        text += format_double(field.values()[flat]) + "\n";
      }
      write_file(config.out / "field_sample_0.csv", text);
    }

    std::cout << "field-sample: energy " << (energy_pass ? "PASS" : "FAIL") << " (z=" << energy_z
              << "), equipartition " << (free_pass ? "PASS" : "FAIL") << " (z=" << free_z << "), parseval "
              << (parseval_pass ? "PASS" : "FAIL") << " (" << parseval << ")\n";
    return all_pass ? int{kExitOk} : int{kExitStatisticalFailure};
  });
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Fluctuating heat diffusion: Langevin modes, influence action and decoherence"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string config_path;
  // flag name -> config key, applied in this order after the file
  const std::vector<std::pair<std::string, std::string>> overrides = {
      {"--seed", "seed"},         {"--out", "out"},           {"--format", "format"},
      {"--k", "k"},               {"--dt", "dt"},             {"--t-end", "t_end"},
      {"--n-traj", "n_traj"},     {"--amplitude", "amplitude"}, {"--duration", "duration"},
      {"--method", "method"},     {"--threads", "threads"},   {"--noise-scale", "noise_scale"},
  };
  std::map<std::string, std::string> values;
  std::vector<std::string> extra;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate", "Simulate mode trajectories and summarize their statistics"},
      {"fdr-verify", "Check stationary variance and relaxation rate against the FDR predictions"},
      {"deco-scan", "Tabulate decoherence exponents over the configured wavenumbers"},
      {"field-sample", "Sample equilibrium lattice fields and check energy fluctuations"},
  };
  for (const auto& [name, description] : commands) {
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "key=value configuration file");
    for (const auto& [flag, key] : overrides) sub->add_option(flag, values[key], "overrides '" + key + "'");
    sub->add_option("--set", extra, "generic override, key=value (repeatable)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? int{kExitOk} : int{kExitConfigError};
  }

  RunConfig config;
  try {
    if (!config_path.empty()) config = load_config_file(config_path);
    for (const auto& [flag, key] : overrides) {
      if (!values[key].empty()) config.set(key, values[key]);
    }
    for (const auto& item : extra) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + item + "'");
      config.set(item.substr(0, eq), item.substr(eq + 1));
    }
    config.validate();
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  }

  const auto* chosen = app.get_subcommands().front();
  const auto& name = chosen->get_name();
  if (name == "simulate") return cmd_simulate(config);
  if (name == "fdr-verify") return cmd_fdr_verify(config);
  if (name == "deco-scan") return cmd_deco_scan(config);
  return cmd_field_sample(config);
}

}  // namespace heatdeco
