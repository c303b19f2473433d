#include "heatdeco/field.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <fftw3.h>

#include "heatdeco/errors.hpp"

namespace heatdeco {

namespace {

// The FFTW planner is not re-entrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex mutex;
  return mutex;
}

void transform(std::vector<std::complex<double>>& data, const std::vector<std::size_t>& extents, int sign) {
  std::vector<int> dims(extents.begin(), extents.end());
  auto* buffer = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan = nullptr;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buffer, buffer, sign, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw std::runtime_error("FFTW could not create a plan");
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

std::size_t total(const std::vector<std::size_t>& extents) {
  return std::accumulate(extents.begin(), extents.end(), std::size_t{1}, std::multiplies<>());
}

// Row-major multi-index of a flat index.
std::vector<std::size_t> unflatten(std::size_t flat, const std::vector<std::size_t>& extents) {
  std::vector<std::size_t> index(extents.size());
  for (std::size_t axis = extents.size(); axis-- > 0;) {
    index[axis] = flat % extents[axis];
    flat /= extents[axis];
  }
  return index;
}

std::size_t negated_flat(std::size_t flat, const std::vector<std::size_t>& extents) {
  const auto index = unflatten(flat, extents);
  std::size_t out = 0;
  for (std::size_t axis = 0; axis < extents.size(); ++axis) {
    const std::size_t n = extents[axis];
    out = out * n + (n - index[axis]) % n;
  }
  return out;
}

}  // namespace

SpectralField::SpectralField(std::vector<std::size_t> extents, std::vector<double> lengths,
                             std::vector<std::complex<double>> coefficients)
    : extents_(std::move(extents)), lengths_(std::move(lengths)), coefficients_(std::move(coefficients)) {
  if (extents_.empty() || extents_.size() > 3) throw std::invalid_argument("spectral dimension must be 1, 2 or 3");
  if (lengths_.size() != extents_.size()) throw std::invalid_argument("one length per axis is required");
  for (auto n : extents_) {
    if (n < 1) throw std::invalid_argument("spectral extents must be >= 1");
  }
  for (auto length : lengths_) {
    if (!(length > 0.0)) throw std::invalid_argument("spectral lengths must be > 0");
  }
  if (coefficients_.size() != total(extents_)) throw std::invalid_argument("coefficient count does not match extents");
}

std::size_t SpectralField::flat_index(std::span<const long> m) const {
  if (m.size() != extents_.size()) throw DimensionMismatchError("wave-vector dimension does not match field");
  std::size_t flat = 0;
  for (std::size_t axis = 0; axis < extents_.size(); ++axis) {
    const auto n = static_cast<long>(extents_[axis]);
    flat = flat * extents_[axis] + static_cast<std::size_t>(((m[axis] % n) + n) % n);
  }
  return flat;
}

std::complex<double>& SpectralField::at(std::span<const long> m) {
  return coefficients_[flat_index(m)];
}

const std::complex<double>& SpectralField::at(std::span<const long> m) const {
  return coefficients_[flat_index(m)];
}

std::vector<double> SpectralField::wavevector(std::size_t flat) const {
  const auto index = unflatten(flat, extents_);
  std::vector<double> k(extents_.size());
  for (std::size_t axis = 0; axis < extents_.size(); ++axis) {
    auto m = static_cast<long>(index[axis]);
    const auto n = static_cast<long>(extents_[axis]);
    if (2 * m > n) m -= n;
    k[axis] = 2.0 * std::numbers::pi * static_cast<double>(m) / lengths_[axis];
  }
  return k;
}

double SpectralField::hermitian_defect() const {
  double defect = 0.0;
  for (std::size_t i = 0; i < coefficients_.size(); ++i) {
    const auto mirror = coefficients_[negated_flat(i, extents_)];
    defect = std::max(defect, std::abs(mirror - std::conj(coefficients_[i])));
  }
  return defect;
}

SpectralField to_modes(const LatticeField& field) {
  std::vector<std::complex<double>> data(field.values().begin(), field.values().end());
  transform(data, field.extents(), FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& c : data) c *= scale;

  std::vector<double> lengths(field.extents().size());
  for (std::size_t axis = 0; axis < lengths.size(); ++axis) {
    lengths[axis] = static_cast<double>(field.extents()[axis]) * field.spacing()[axis];
  }
  return SpectralField(field.extents(), std::move(lengths), std::move(data));
}

LatticeField from_modes(const SpectralField& spectrum) {
  double largest = 0.0;
  double magnitude = 0.0;
  for (const auto& c : spectrum.coefficients()) {
    largest = std::max(largest, std::abs(c));
    magnitude += std::abs(c);
  }
  const double defect = spectrum.hermitian_defect();
  if (defect > 1e-12 * largest) {
    throw NonHermitianError("spectrum is not Hermitian-symmetric (defect " + std::to_string(defect) + ")");
  }

  std::vector<std::complex<double>> data(spectrum.coefficients().begin(), spectrum.coefficients().end());
  transform(data, spectrum.extents(), FFTW_BACKWARD);

  std::vector<double> values(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (std::abs(data[i].imag()) > 1e-12 * std::max(magnitude, 1.0)) {
      throw NonHermitianError("inverse transform left an imaginary residue of " +
                              std::to_string(data[i].imag()));
    }
    values[i] = data[i].real();
  }

  std::vector<double> spacing(spectrum.extents().size());
  for (std::size_t axis = 0; axis < spacing.size(); ++axis) {
    spacing[axis] = spectrum.lengths()[axis] / static_cast<double>(spectrum.extents()[axis]);
  }
  return LatticeField(spectrum.extents(), std::move(spacing), std::move(values));
}

double parseval_check(const LatticeField& field) {
  double site_sum = 0.0;
  for (double v : field.values()) site_sum += v * v;
  const double real_space = field.cell_volume() * site_sum;

  const auto spectrum = to_modes(field);
  double mode_sum = 0.0;
  for (const auto& c : spectrum.coefficients()) mode_sum += std::norm(c);
  const double mode_space = field.volume() * mode_sum;

  const double scale = std::max(real_space, mode_space);
  return scale == 0.0 ? 0.0 : std::abs(real_space - mode_space) / scale;
}

LatticeField sample_equilibrium_field(const MediumParams& params, const LatticeField& geometry,
                                      NoiseStream& stream) {
  if (geometry.dimension() != params.dimension()) {
    throw DimensionMismatchError("lattice dimension does not match medium dimension");
  }
  LatticeField field = LatticeField::zeros(geometry.extents(), geometry.spacing());
  const double sd = params.T0() / std::sqrt(params.c0() * field.cell_volume());
  for (double& v : field.values()) v = sd * stream.unit_normal();
  return field;
}

double total_energy_change(const MediumParams& params, const LatticeField& field) {
  double sum = 0.0;
  for (double v : field.values()) sum += v;
  return params.c0() * field.cell_volume() * sum;
}

EnsembleStats total_energy_fluctuation(const MediumParams& params, std::span<const LatticeField> fields) {
  if (fields.size() < 2) throw TooFewSamplesError("energy fluctuation needs at least two fields");
  std::vector<double> energies;
  energies.reserve(fields.size());
  for (const auto& field : fields) {
    if (!field.same_geometry(fields.front())) throw GridMismatchError("fields do not share a lattice geometry");
    energies.push_back(total_energy_change(params, field));
  }
  return sample_variance(energies);
}

}  // namespace heatdeco
