// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
// Usage: heatdeco_acceptance <artifact-dir>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "heatdeco/commands.hpp"
#include "heatdeco/config.hpp"
#include "heatdeco/field.hpp"
#include "heatdeco/influence.hpp"
#include "heatdeco/langevin.hpp"
#include "heatdeco/stats.hpp"
#include "heatdeco/thermo.hpp"

using namespace heatdeco;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 12345;
const MediumParams kUnit(1.0, 1.0, 1.0);

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, format, a, b, c, d);
  return buffer;
}

// Standard error of the mean of a correlated series, from non-overlapping batch means.
double batch_mean_stderr(std::span<const double> series, std::size_t batches) {
  const std::size_t length = series.size() / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < length; ++i) sum += series[b * length + i];
    means[b] = sum / static_cast<double>(length);
  }
  return sample_variance(means).stderr_mean();
}

Outcome criterion_stationary_variance() {
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.method = Method::ExactOu;
  cfg.seed = kSeed;
  const auto samples = stationary_samples(kUnit, 1.0, cfg, 100000, default_burn_in(kUnit, 1.0));
  const auto stats = sample_variance(samples);
  const double z = std::abs(stats.variance - 1.0) / stats.stderr_variance;
  return {z <= 3.0, fmt("variance %.5f, stderr %.5f, z %.2f (limit 3)", stats.variance, stats.stderr_variance, z)};
}

Outcome criterion_rate_recovery() {
  const MediumParams p(2.0, 4.0, 0.5);
  const double gamma = relaxation_rate(p, 3.0);
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 1e6 * cfg.dt;
  cfg.seed = kSeed;
  cfg.initial = SampleEquilibrium{};
  const auto history = simulate_mode(p, 3.0, cfg);
  const auto max_lag = static_cast<std::size_t>(std::ceil(4.0 / (gamma * cfg.dt)));
  const double rate = fit_exponential_rate(autocorrelation(history, max_lag));
  const double error = std::abs(rate - gamma) / gamma;
  // Reference point for how far this particular path sits from gamma: the
  // conditional maximum-likelihood AR(1) estimate on the same samples.
  double lagged = 0.0;
  double squares = 0.0;
  for (std::size_t n = 0; n + 1 < history.size(); ++n) {
    lagged += history.values[n] * history.values[n + 1];
    squares += history.values[n] * history.values[n];
  }
  const double mle = -std::log(lagged / squares) / cfg.dt;
  return {error <= 0.02, fmt("fitted %.5f vs %.5f, relative error %.4f (limit 0.02), AR(1) likelihood estimate on "
                             "the same path %.5f",
                             rate, gamma, error, mle)};
}

Outcome criterion_euler_bias() {
  // Both steppers are driven by the same normals, so the bias is measured as a
  // paired difference; each path runs for the same physical time.
  const double dts[] = {0.1, 0.05, 0.025};
  const double t_total = 2e5;
  const double burn = default_burn_in(kUnit, 1.0);
  std::vector<double> bias;
  bool exact_ok = true;
  std::ostringstream detail;
  for (std::size_t i = 0; i < 3; ++i) {
    SimConfig cfg;
    cfg.dt = dts[i];
    cfg.t_end = t_total + burn;
    cfg.seed = kSeed;
    cfg.initial = SampleEquilibrium{};
    cfg.method = Method::ExactOu;
    const auto exact = simulate_mode(kUnit, 1.0, cfg, i);
    cfg.method = Method::EulerMaruyama;
    const auto euler = simulate_mode(kUnit, 1.0, cfg, i);

    const auto skip = static_cast<std::size_t>(std::ceil(burn / cfg.dt));
    const std::span<const double> xe(exact.values.data() + skip, exact.size() - skip);
    const std::span<const double> xm(euler.values.data() + skip, euler.size() - skip);
    std::vector<double> sq(xe.size());
    std::vector<double> paired(xe.size());
    for (std::size_t n = 0; n < xe.size(); ++n) {
      sq[n] = xe[n] * xe[n];
      paired[n] = xm[n] * xm[n] - xe[n] * xe[n];
    }
    const double var_exact = sample_variance(xe).variance;
    const double var_euler = sample_variance(xm).variance;
    const double se_exact = batch_mean_stderr(sq, 100);
    const double se_bias = batch_mean_stderr(paired, 100);
    bias.push_back(var_euler - var_exact);
    const double z_exact = std::abs(var_exact - 1.0) / se_exact;
    exact_ok = exact_ok && z_exact <= 3.0;
    detail << fmt("dt=%.3f bias %.5f+-%.5f exact z %.2f; ", dts[i], bias.back(), se_bias, z_exact);
  }
  const double r1 = bias[0] / bias[1];
  const double r2 = bias[1] / bias[2];
  const bool ratios_ok = r1 >= 1.5 && r1 <= 3.0 && r2 >= 1.5 && r2 <= 3.0;
  detail << fmt("ratios %.3f %.3f (range [1.5, 3])", r1, r2);
  return {ratios_ok && exact_ok, detail.str()};
}

ModeHistory random_history(proptest::Gen& gen, double k, double dt, std::size_t n) {
  return gen.history(k, dt, n);
}

Outcome criterion_antisymmetry() {
  proptest::Gen gen(404);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = gen.params(static_cast<int>(gen.index(1, 3)));
    const std::size_t modes = gen.index(1, 4);
    const double dt = gen.log_uniform(1e-3, 0.5);
    const std::size_t n = gen.index(2, 300);
    std::vector<ModeHistory> b1;
    std::vector<ModeHistory> b2;
    std::vector<double> weights;
    for (std::size_t j = 0; j < modes; ++j) {
      const double k = gen.log_uniform(0.05, 10.0);
      b1.push_back(random_history(gen, k, dt, n));
      b2.push_back(random_history(gen, k, dt, n));
      weights.push_back(gen.log_uniform(0.01, 2.0));
    }
    worst = std::max(worst, antisymmetry_residual(p, HistoryPair(b1, b2, weights)));
  }
  return {worst <= 1e-12, fmt("max residual %.3e over 100 pairs (limit 1e-12)", worst)};
}

Outcome criterion_static_identity() {
  proptest::Gen gen(505);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = gen.params();
    const std::size_t n = gen.index(1, 16);
    std::vector<ModeSpec> modes;
    for (std::size_t j = 0; j < n; ++j) modes.emplace_back(gen.log_uniform(1e-2, 1e2), gen.log_uniform(0.01, 2.0));
    worst = std::max(worst, static_free_energy_identity(p, gen.values(n, 5.0), gen.values(n, 5.0), modes));
  }
  return {worst <= 1e-14, fmt("max relative residual %.3e over 1000 draws (limit 1e-14)", worst)};
}

Outcome criterion_decoherence_scaling() {
  proptest::Gen gen(606);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = gen.params();
    const double k = gen.log_uniform(0.05, 20.0);
    const double dt = gen.log_uniform(1e-3, 0.5);
    const std::size_t n = gen.index(2, 200);
    auto a = random_history(gen, k, dt, n);
    auto b = random_history(gen, k, dt, n);
    const double e1 = decoherence_exponent(p, HistoryPair({a}, {b}, {1.0})).total_exponent;
    a.k = b.k = 2.0 * k;
    const double e2 = decoherence_exponent(p, HistoryPair({a}, {b}, {1.0})).total_exponent;
    worst = std::max(worst, std::abs(e1 / e2 - 4.0));
  }
  const auto rows = decoherence_scan(kUnit, {0.5, 1.0, 2.0, 4.0}, 0.1, 10.0);
  const bool monotone = scan_is_monotone(rows);
  const auto conserved = decoherence_scan(kUnit, {0.0}, 0.1, 10.0).front();
  const bool exact = conserved.magnitude == 0.0 && conserved.conserved;
  std::ostringstream detail;
  detail << fmt("max |ratio - 4| %.3e (limit 1e-14); scan exponents", worst);
  for (const auto& row : rows) detail << ' ' << row.exponent;
  detail << (monotone ? " strictly decreasing" : " NOT decreasing");
  detail << "; k=0 magnitude " << conserved.magnitude << (conserved.conserved ? " flagged" : " unflagged");
  return {worst <= 1e-14 && monotone && exact, detail.str()};
}

Outcome criterion_energy_fluctuation() {
  const auto geometry = LatticeField::zeros({64}, {1.0});
  const std::size_t n_fields = 100000;
  std::vector<double> energies(n_fields);
  std::vector<LatticeField> fields;
  fields.reserve(n_fields);
  for (std::size_t i = 0; i < n_fields; ++i) {
    NoiseStream stream(0.0, kSeed, i);
    fields.push_back(sample_equilibrium_field(kUnit, geometry, stream));
  }
  const auto stats = total_energy_fluctuation(kUnit, fields);
  const double expected = geometry.volume() * kUnit.c0() * kUnit.T0() * kUnit.T0();
  const double z = std::abs(stats.variance - expected) / stats.stderr_variance;
  return {z <= 3.0, fmt("<dU^2> %.3f vs %.0f, stderr %.3f, z %.2f (limit 3)", stats.variance, expected,
                        stats.stderr_variance, z)};
}

Outcome criterion_hessian() {
  proptest::Gen gen(808);
  double worst_diag = 0.0;
  double worst_off = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int d = static_cast<int>(gen.index(1, 3));
    const auto p = gen.params(d);
    std::vector<std::size_t> extents;
    std::vector<double> spacing;
    std::size_t n = 1;
    for (int axis = 0; axis < d; ++axis) {
      extents.push_back(gen.index(1, d == 1 ? 16 : 4));
      spacing.push_back(gen.log_uniform(0.2, 2.0));
      n *= extents.back();
    }
    const LatticeField field(extents, spacing, gen.values(n, gen.log_uniform(0.01, 10.0)));
    const auto check = free_energy_hessian_check(p, field);
    worst_diag = std::max(worst_diag, check.max_diagonal_relative);
    worst_off = std::max(worst_off, check.max_off_diagonal_abs);
  }
  return {worst_diag <= 1e-6 && worst_off <= 1e-10,
          fmt("max diagonal relative error %.3e (limit 1e-6), max off-diagonal %.3e (limit 1e-10), 50 fields",
              worst_diag, worst_off)};
}

Outcome criterion_transforms() {
  proptest::Gen gen(909);
  double worst_round_trip = 0.0;
  double worst_parseval = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 3;
    std::vector<std::size_t> extents;
    std::vector<double> spacing;
    std::size_t n = 1;
    for (int axis = 0; axis < d; ++axis) {
      extents.push_back(gen.index(1, d == 1 ? 128 : (d == 2 ? 24 : 10)));
      spacing.push_back(gen.log_uniform(0.1, 3.0));
      n *= extents.back();
    }
    const LatticeField field(extents, spacing, gen.values(n, gen.log_uniform(0.1, 10.0)));
    const auto back = from_modes(to_modes(field));
    double scale = 0.0;
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      scale = std::max(scale, std::abs(field.values()[i]));
      diff = std::max(diff, std::abs(back.values()[i] - field.values()[i]));
    }
    worst_round_trip = std::max(worst_round_trip, diff / std::max(scale, 1.0));
    worst_parseval = std::max(worst_parseval, parseval_check(field));
  }
  return {worst_round_trip <= 1e-12 && worst_parseval <= 1e-12,
          fmt("max round-trip residual %.3e, max Parseval residual %.3e (limit 1e-12), 100 fields",
              worst_round_trip, worst_parseval)};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    files[fs::relative(entry.path(), root).generic_string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return files;
}

Outcome criterion_determinism(const fs::path& artifacts) {
  using Command = int (*)(const RunConfig&);
  const std::pair<const char*, Command> commands[] = {
      {"simulate", cmd_simulate},
      {"fdr-verify", cmd_fdr_verify},
      {"deco-scan", cmd_deco_scan},
      {"field-sample", cmd_field_sample},
  };
  const unsigned thread_counts[] = {1, 2, 8};
  std::vector<std::map<std::string, std::string>> runs;
  std::ostringstream sink;
  auto* saved = std::cout.rdbuf(sink.rdbuf());
  bool exits_ok = true;
  for (unsigned threads : thread_counts) {
    const auto root = artifacts / ("threads_" + std::to_string(threads));
    fs::remove_all(root);
    for (const auto& [name, command] : commands) {
      RunConfig config;
      config.k_list = {1.0, 2.0};
      config.seed = kSeed;
      config.threads = threads;
      config.out = root / name;
      exits_ok = command(config) == kExitOk && exits_ok;
    }
    runs.push_back(snapshot(root));
  }
  std::cout.rdbuf(saved);

  std::size_t mismatched = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].size() != runs[0].size()) ++mismatched;
    for (const auto& [name, bytes] : runs[0]) {
      const auto it = runs[r].find(name);
      if (it == runs[r].end() || it->second != bytes) ++mismatched;
    }
  }
  std::ostringstream detail;
  detail << runs[0].size() << " artifacts from 4 commands compared across 1, 2 and 8 threads, " << mismatched
         << " differing" << (exits_ok ? "" : ", a command exited non-zero");
  return {exits_ok && mismatched == 0 && !runs[0].empty(), detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path artifacts = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "heatdeco_acceptance";
  fs::create_directories(artifacts);

  struct Criterion {
    int id;
    const char* name;
    double time_limit;  // seconds, 0 for none
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "stationary variance", 5.0, criterion_stationary_variance},
      {2, "rate recovery", 30.0, criterion_rate_recovery},
      {3, "Euler-Maruyama first-order bias", 0.0, criterion_euler_bias},
      {4, "influence-action antisymmetry", 1.0, criterion_antisymmetry},
      {5, "static imaginary-time identity", 0.0, criterion_static_identity},
      {6, "decoherence scaling", 0.0, criterion_decoherence_scaling},
      {7, "energy fluctuation", 10.0, criterion_energy_fluctuation},
      {8, "free-energy Hessian", 0.0, criterion_hessian},
      {9, "transform integrity", 0.0, criterion_transforms},
      {10, "determinism across thread counts", 0.0, [&] { return criterion_determinism(artifacts); }},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = outcome.pass;
    std::string timing = fmt("%.2f s", seconds);
    if (criterion.time_limit > 0.0) {
      timing += fmt(" (limit %.0f s)", criterion.time_limit);
      pass = pass && seconds < criterion.time_limit;
    }
    if (!pass) ++failures;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << criterion.id << ": " << criterion.name << ": " << outcome.detail
              << "; " << timing << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
