#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace heatdeco {

/// Background thermodynamic state of the medium. Boltzmann constant is 1,
/// so temperatures carry energy units.
class MediumParams {
 public:
  /// Throws std::invalid_argument unless T0, c0, D0 > 0 and 1 <= dimension <= 3.
  MediumParams(double T0, double c0, double D0, int dimension = 1);

  double T0() const { return T0_; }
  double c0() const { return c0_; }
  double D0() const { return D0_; }
  int dimension() const { return dimension_; }
  double beta0() const { return beta0_; }

 private:
  double T0_;
  double c0_;
  double D0_;
  int dimension_;
  double beta0_;
};

/// One Fourier mode of magnitude k together with its share w_k of the d^dk
/// measure.
class ModeSpec {
 public:
  explicit ModeSpec(double k, double weight = 1.0);

  double k() const { return k_; }
  double weight() const { return weight_; }

 private:
  double k_;
  double weight_;
};

/// Real-space temperature perturbation on a periodic rectangular lattice,
/// stored row-major (last axis fastest).
class LatticeField {
 public:
  LatticeField(std::vector<std::size_t> extents, std::vector<double> spacing,
               std::vector<double> values);

  static LatticeField zeros(std::vector<std::size_t> extents, std::vector<double> spacing);

  int dimension() const { return static_cast<int>(extents_.size()); }
  const std::vector<std::size_t>& extents() const { return extents_; }
  const std::vector<double>& spacing() const { return spacing_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::size_t size() const { return values_.size(); }

  /// a^d, the volume element attached to each site.
  double cell_volume() const;
  /// V = prod(extent * spacing).
  double volume() const;

  bool same_geometry(const LatticeField& other) const;

 private:
  std::vector<std::size_t> extents_;
  std::vector<double> spacing_;
  std::vector<double> values_;
};

/// gamma_k = D0 k^2 / c0.
double relaxation_rate(const MediumParams& params, double k);

/// Gamma_k = D0 k^2 T0^2 / c0^2, half the white-noise correlation strength.
double noise_strength(const MediumParams& params, double k);

/// A_k = c0^2 / (D0 k^2 T0) = T0 / Gamma_k. Throws SingularModeError at k = 0.
double coupling_constant(const MediumParams& params, double k);

/// <(dT_k)^2> = T0^2 / c0, identical for every mode.
double equilibrium_mode_variance(const MediumParams& params);

/// Delta F = (c0 / 2 T0) * sum_sites a^d dT^2.
double free_energy_change(const MediumParams& params, const LatticeField& field);

/// Unnormalized log of the equilibrium density exp(-beta0 Delta F).
double equilibrium_log_density(const MediumParams& params, const LatticeField& field);

struct HessianCheck {
  double expected_diagonal = 0.0;          // (c0/T0) a^d
  double max_diagonal_relative = 0.0;      // max |H_ii - expected| / expected
  double max_off_diagonal_abs = 0.0;       // max |H_ij|, i != j

  double residual() const { return max_diagonal_relative; }
};

/// Central finite-difference Hessian of free_energy_change at `field`,
/// compared against (c0/T0) a^d * identity. The default step is
/// 1e-3 * max(1, max|dT|).
HessianCheck free_energy_hessian_check(const MediumParams& params, const LatticeField& field,
                                       std::optional<double> step = std::nullopt);

}  // namespace heatdeco
