#include "heatdeco/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace heatdeco {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key) + ": expected " +
                    std::string(expected));
}

double to_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    bad_value(key, text, "a finite number");
  }
  return value;
}

template <class Int>
Int to_integer(std::string_view key, std::string_view text) {
  text = trim(text);
  Int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) bad_value(key, text, "a non-negative integer");
  return value;
}

template <class T, class Parse>
std::vector<T> to_list(std::string_view key, std::string_view text, Parse parse) {
  std::vector<T> out;
  while (true) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    if (item.empty()) bad_value(key, text, "a comma-separated list");
    out.push_back(parse(key, item));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

template <class T>
std::string join(const std::vector<T>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(items[i]);
    } else {
      out += std::to_string(items[i]);
    }
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "T0") {
    T0 = to_double(key, value);
  } else if (key == "c0") {
    c0 = to_double(key, value);
  } else if (key == "D0") {
    D0 = to_double(key, value);
  } else if (key == "d") {
    dimension = to_integer<int>(key, value);
  } else if (key == "k") {
    k_list = to_list<double>(key, value, to_double);
    k_count = 0;
  } else if (key == "k_min") {
    k_min = to_double(key, value);
  } else if (key == "dk") {
    dk = to_double(key, value);
  } else if (key == "k_count") {
    k_count = to_integer<std::size_t>(key, value);
  } else if (key == "weight") {
    weight = to_double(key, value);
  } else if (key == "dt") {
    dt = to_double(key, value);
  } else if (key == "t_end") {
    t_end = to_double(key, value);
  } else if (key == "method") {
    try {
      method = parse_method(value);
    } catch (const std::invalid_argument&) {
      bad_value(key, value, "exact-ou or euler-maruyama");
    }
  } else if (key == "burn_in") {
    if (value == "auto") {
      burn_in.reset();
    } else {
      burn_in = to_double(key, value);
    }
  } else if (key == "n_traj") {
    n_traj = to_integer<std::size_t>(key, value);
  } else if (key == "seed") {
    seed = to_integer<std::uint64_t>(key, value);
  } else if (key == "x0") {
    if (value == "equilibrium") {
      x0.reset();
    } else {
      x0 = to_double(key, value);
    }
  } else if (key == "noise_scale") {
    noise_scale = to_double(key, value);
  } else if (key == "decorrelation") {
    decorrelation = to_double(key, value);
  } else if (key == "samples") {
    samples = to_integer<std::size_t>(key, value);
  } else if (key == "rate_steps") {
    rate_steps = to_integer<std::size_t>(key, value);
  } else if (key == "rate_dt") {
    if (value == "auto") {
      rate_dt.reset();
    } else {
      rate_dt = to_double(key, value);
    }
  } else if (key == "rate_tolerance") {
    rate_tolerance = to_double(key, value);
  } else if (key == "z_threshold") {
    z_threshold = to_double(key, value);
  } else if (key == "amplitude") {
    amplitude = to_double(key, value);
  } else if (key == "duration") {
    duration = to_double(key, value);
  } else if (key == "deco_steps") {
    deco_steps = to_integer<std::size_t>(key, value);
  } else if (key == "lattice") {
    lattice = to_list<std::size_t>(key, value, to_integer<std::size_t>);
  } else if (key == "spacing") {
    spacing = to_list<double>(key, value, to_double);
  } else if (key == "n_fields") {
    n_fields = to_integer<std::size_t>(key, value);
  } else if (key == "out") {
    out = std::string(value);
  } else if (key == "format") {
    if (value == "csv") {
      format = OutputFormat::Csv;
    } else if (value == "json") {
      format = OutputFormat::Json;
    } else {
      bad_value(key, value, "csv or json");
    }
  } else if (key == "threads") {
    threads = to_integer<unsigned>(key, value);
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

void RunConfig::validate() const {
  try {
    (void)medium();
    (void)modes();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (k_count == 0 && k_list.empty()) throw ConfigError("no modes configured");
  if (k_count > 0 && !(dk > 0.0)) throw ConfigError("dk must be > 0 for a k grid");
  std::set<double> seen;
  for (const auto& mode : modes()) {
    if (!seen.insert(mode.k()).second) throw ConfigError("duplicate wavenumber " + format_double(mode.k()));
  }
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  if (!(t_end >= dt)) throw ConfigError("t_end must be >= dt");
  if (burn_in && !(*burn_in >= 0.0)) throw ConfigError("burn_in must be >= 0");
  if (n_traj < 1) throw ConfigError("n_traj must be >= 1");
  if (!(noise_scale >= 0.0)) throw ConfigError("noise_scale must be >= 0");
  if (!(decorrelation > 0.0)) throw ConfigError("decorrelation must be > 0");
  if (samples < 2) throw ConfigError("samples must be >= 2");
  if (rate_steps < 3) throw ConfigError("rate_steps must be >= 3");
  if (rate_dt && !(*rate_dt > 0.0 && std::isfinite(*rate_dt))) throw ConfigError("rate_dt must be > 0");
  if (!(rate_tolerance > 0.0)) throw ConfigError("rate_tolerance must be > 0");
  if (!(z_threshold > 0.0)) throw ConfigError("z_threshold must be > 0");
  if (!(amplitude > 0.0)) throw ConfigError("amplitude must be > 0");
  if (!(duration > 0.0)) throw ConfigError("duration must be > 0");
  if (deco_steps < 1) throw ConfigError("deco_steps must be >= 1");
  if (lattice.size() != static_cast<std::size_t>(dimension)) {
    throw ConfigError("lattice needs one extent per dimension (d = " + std::to_string(dimension) + ")");
  }
  if (spacing.size() != 1 && spacing.size() != lattice.size()) {
    throw ConfigError("spacing must be a single value or one per axis");
  }
  if (n_fields < 2) throw ConfigError("n_fields must be >= 2");
  try {
    (void)lattice_geometry();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

MediumParams RunConfig::medium() const {
  return MediumParams(T0, c0, D0, dimension);
}

std::vector<ModeSpec> RunConfig::modes() const {
  std::vector<ModeSpec> out;
  if (k_count > 0) {
    for (std::size_t i = 0; i < k_count; ++i) out.emplace_back(k_min + static_cast<double>(i) * dk, dk);
  } else {
    for (double k : k_list) out.emplace_back(k, weight);
  }
  return out;
}

SimConfig RunConfig::sim() const {
  SimConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.method = method;
  cfg.seed = seed;
  cfg.noise_scale = noise_scale;
  if (x0) {
    cfg.initial = *x0;
  } else {
    cfg.initial = SampleEquilibrium{};
  }
  return cfg;
}

LatticeField RunConfig::lattice_geometry() const {
  std::vector<double> axes = spacing;
  if (axes.size() == 1) axes.assign(lattice.size(), spacing.front());
  return LatticeField::zeros(lattice, axes);
}

std::vector<std::pair<std::string, std::string>> RunConfig::resolved() const {
  std::vector<double> ks;
  std::vector<double> weights;
  for (const auto& mode : modes()) {
    ks.push_back(mode.k());
    weights.push_back(mode.weight());
  }
  return {
      {"T0", format_double(T0)},
      {"c0", format_double(c0)},
      {"D0", format_double(D0)},
      {"d", std::to_string(dimension)},
      {"k", join(ks)},
      {"weights", join(weights)},
      {"dt", format_double(dt)},
      {"t_end", format_double(t_end)},
      {"method", std::string(to_string(method))},
      {"burn_in", burn_in ? format_double(*burn_in) : "auto"},
      {"n_traj", std::to_string(n_traj)},
      {"seed", std::to_string(seed)},
      {"x0", x0 ? format_double(*x0) : "equilibrium"},
      {"noise_scale", format_double(noise_scale)},
      {"decorrelation", format_double(decorrelation)},
      {"samples", std::to_string(samples)},
      {"rate_steps", std::to_string(rate_steps)},
      {"rate_dt", rate_dt ? format_double(*rate_dt) : "auto"},
      {"rate_tolerance", format_double(rate_tolerance)},
      {"z_threshold", format_double(z_threshold)},
      {"amplitude", format_double(amplitude)},
      {"duration", format_double(duration)},
      {"deco_steps", std::to_string(deco_steps)},
      {"lattice", join(lattice)},
      {"spacing", join(spacing)},
      {"n_fields", std::to_string(n_fields)},
      {"format", format == OutputFormat::Csv ? "csv" : "json"},
  };
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t line_number = 0;
  while (!text.empty()) {
    const auto newline = text.find('\n');
    auto line = text.substr(0, newline);
    text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);
    ++line_number;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_number) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_number) + ": empty key");
    out.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read configuration file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  for (const auto& [key, value] : parse_key_values(text.str())) base.set(key, value);
  return base;
}

}  // namespace heatdeco
