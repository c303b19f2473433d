#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "heatdeco/langevin.hpp"
#include "heatdeco/thermo.hpp"

namespace heatdeco {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Json };

/// Everything a CLI run needs. Values come from defaults, then a key=value
/// file, then command-line overrides, all through set().
struct RunConfig {
  // medium
  double T0 = 1.0;
  double c0 = 1.0;
  double D0 = 1.0;
  int dimension = 1;

  // modes: explicit list, or a uniform grid when k_count > 0
  std::vector<double> k_list{1.0};
  double k_min = 0.0;
  double dk = 0.0;
  std::size_t k_count = 0;
  double weight = 1.0;  // per-mode weight for explicit lists; grids use dk

  // dynamics
  double dt = 0.01;
  double t_end = 1010.0;
  Method method = Method::ExactOu;
  std::optional<double> burn_in;  // nullopt: 10 / gamma_k
  std::size_t n_traj = 300;
  std::uint64_t seed = 12345;
  std::optional<double> x0;  // nullopt: equilibrium draw
  double noise_scale = 1.0;
  double decorrelation = 3.0;  // thinning stride in relaxation times

  // fdr-verify
  std::size_t samples = 100000;
  std::size_t rate_steps = 1000000;
  std::optional<double> rate_dt;  // nullopt: 0.1 / gamma_k for exact-ou, dt for euler-maruyama
  double rate_tolerance = 0.02;
  double z_threshold = 3.0;

  // deco-scan
  double amplitude = 0.1;
  double duration = 10.0;
  std::size_t deco_steps = 100;

  // field-sample
  std::vector<std::size_t> lattice{64};
  std::vector<double> spacing{1.0};
  std::size_t n_fields = 100000;

  // execution; these never change results and are not echoed
  std::filesystem::path out = ".";
  OutputFormat format = OutputFormat::Csv;
  unsigned threads = 0;

  /// Assigns one key. Throws ConfigError for unknown keys or bad values.
  void set(std::string_view key, std::string_view value);

  /// Throws ConfigError when the combination of values is unusable.
  void validate() const;

  MediumParams medium() const;
  std::vector<ModeSpec> modes() const;
  SimConfig sim() const;
  /// Lattice geometry (all-zero field) for field sampling.
  LatticeField lattice_geometry() const;

  /// Every result-affecting key with its resolved value, in a fixed order.
  std::vector<std::pair<std::string, std::string>> resolved() const;
};

/// Parses "key = value" lines; blank lines and '#' comments are skipped.
/// Throws ConfigError on a line without '='.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text);

/// Applies a configuration file on top of `base`. Throws ConfigError if the
/// file cannot be read or parsed.
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

/// Shortest-exact text for a double: 17 significant digits, "inf"/"-inf"/"nan".
std::string format_double(double value);

}  // namespace heatdeco
