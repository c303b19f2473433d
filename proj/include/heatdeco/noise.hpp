#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace heatdeco {

/// Mixes (master seed, substream id) into the 64-bit seed of an independent
/// generator. Two rounds of the SplitMix64 finalizer; the mapping is fixed
/// and platform independent.
std::uint64_t derive_substream_seed(std::uint64_t master_seed, std::uint64_t substream);

/// Per-trajectory source of the white noise xi_k with <xi xi'> = 2 Gamma delta(t - t').
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Uniforms take the top 53 bits of each draw; normals come from
/// the Marsaglia polar method, so sequences do not depend on the standard
/// library's distribution implementations.
class NoiseStream {
 public:
  NoiseStream(double gamma, std::uint64_t master_seed, std::uint64_t substream);

  double gamma() const { return gamma_; }
  std::uint64_t substream() const { return substream_; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double unit_normal();

 private:
  std::mt19937_64 engine_;
  double gamma_;
  std::uint64_t substream_;
  std::optional<double> spare_;
};

/// Gaussian sample of variance 2 Gamma / dt, the one-step discretization of
/// delta-correlated noise.
double draw_noise_increment(NoiseStream& stream, double dt);

}  // namespace heatdeco
