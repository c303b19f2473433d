#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "heatdeco/noise.hpp"
#include "heatdeco/stats.hpp"
#include "heatdeco/thermo.hpp"

namespace heatdeco {

/// Discrete Fourier coefficients of a lattice field. Coefficients are stored
/// in FFT order per axis (index m in [0, N), with m > N/2 standing for m - N),
/// row-major like LatticeField.
class SpectralField {
 public:
  SpectralField(std::vector<std::size_t> extents, std::vector<double> lengths,
                std::vector<std::complex<double>> coefficients);

  int dimension() const { return static_cast<int>(extents_.size()); }
  const std::vector<std::size_t>& extents() const { return extents_; }
  const std::vector<double>& lengths() const { return lengths_; }
  std::span<const std::complex<double>> coefficients() const { return coefficients_; }
  std::span<std::complex<double>> coefficients() { return coefficients_; }

  /// Coefficient at a signed integer wave-vector; components are taken modulo
  /// the extents.
  std::complex<double>& at(std::span<const long> m);
  const std::complex<double>& at(std::span<const long> m) const;

  /// Physical wave-vector k_m = 2 pi m / L for a flat index, with m mapped
  /// into (-N/2, N/2].
  std::vector<double> wavevector(std::size_t flat_index) const;

  /// Max |c(-m) - conj(c(m))| over all m.
  double hermitian_defect() const;

 private:
  std::size_t flat_index(std::span<const long> m) const;

  std::vector<std::size_t> extents_;
  std::vector<double> lengths_;
  std::vector<std::complex<double>> coefficients_;
};

/// c(m) = (1/N_total) sum_j dT(x_j) e^{-i k_m . x_j}; c(0) is the spatial mean.
SpectralField to_modes(const LatticeField& field);

/// dT(x_j) = sum_m c(m) e^{+i k_m . x_j}. Throws NonHermitianError when the
/// spectrum is not Hermitian-symmetric (and so would not synthesize a real
/// field) to within 1e-12 relative to its largest coefficient.
LatticeField from_modes(const SpectralField& spectrum);

/// |sum a^d dT^2 - V sum |c|^2| / max(both sides); 0 for the zero field.
double parseval_check(const LatticeField& field);

/// Independent site Gaussians of variance T0^2 / (c0 a^d): an exact draw
/// from exp(-beta0 Delta F). Uses the stream's unit normals only.
LatticeField sample_equilibrium_field(const MediumParams& params, const LatticeField& geometry,
                                      NoiseStream& stream);

/// Delta U = c0 sum_sites a^d dT.
double total_energy_change(const MediumParams& params, const LatticeField& field);

/// Statistics of Delta U over an ensemble of fields sharing one geometry.
/// The expected variance in equilibrium is V c0 T0^2.
EnsembleStats total_energy_fluctuation(const MediumParams& params, std::span<const LatticeField> fields);

}  // namespace heatdeco
