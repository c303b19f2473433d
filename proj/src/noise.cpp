#include "heatdeco/noise.hpp"

#include <cmath>

namespace heatdeco {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_substream_seed(std::uint64_t master_seed, std::uint64_t substream) {
  return splitmix64(master_seed ^ splitmix64(substream));
}

NoiseStream::NoiseStream(double gamma, std::uint64_t master_seed, std::uint64_t substream)
    : engine_(derive_substream_seed(master_seed, substream)), gamma_(gamma), substream_(substream) {}

double NoiseStream::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double NoiseStream::unit_normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  return u * factor;
}

double draw_noise_increment(NoiseStream& stream, double dt) {
  return std::sqrt(2.0 * stream.gamma() / dt) * stream.unit_normal();
}

}  // namespace heatdeco
