#include "heatdeco/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

#include "heatdeco/errors.hpp"

namespace heatdeco {

MediumParams::MediumParams(double T0, double c0, double D0, int dimension)
    : T0_(T0), c0_(c0), D0_(D0), dimension_(dimension), beta0_(1.0 / T0) {
  if (!(T0 > 0.0) || !std::isfinite(T0)) throw std::invalid_argument("T0 must be positive and finite");
  if (!(c0 > 0.0) || !std::isfinite(c0)) throw std::invalid_argument("c0 must be positive and finite");
  if (!(D0 > 0.0) || !std::isfinite(D0)) throw std::invalid_argument("D0 must be positive and finite");
  if (dimension < 1 || dimension > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
}

ModeSpec::ModeSpec(double k, double weight) : k_(k), weight_(weight) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw std::invalid_argument("mode wavenumber must be >= 0");
  if (!(weight > 0.0) || !std::isfinite(weight)) throw std::invalid_argument("mode weight must be > 0");
}

LatticeField::LatticeField(std::vector<std::size_t> extents, std::vector<double> spacing,
                           std::vector<double> values)
    : extents_(std::move(extents)), spacing_(std::move(spacing)), values_(std::move(values)) {
  if (extents_.empty() || extents_.size() > 3) throw std::invalid_argument("lattice dimension must be 1, 2 or 3");
  if (spacing_.size() != extents_.size()) throw std::invalid_argument("one spacing per axis is required");
  for (auto n : extents_) {
    if (n < 1) throw std::invalid_argument("lattice extents must be >= 1");
  }
  for (auto a : spacing_) {
    if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("lattice spacing must be > 0");
  }
  const auto sites = std::accumulate(extents_.begin(), extents_.end(), std::size_t{1}, std::multiplies<>());
  if (values_.size() != sites) {
    throw std::invalid_argument("lattice has " + std::to_string(sites) + " sites but " +
                                std::to_string(values_.size()) + " values");
  }
}

LatticeField LatticeField::zeros(std::vector<std::size_t> extents, std::vector<double> spacing) {
  const auto sites = std::accumulate(extents.begin(), extents.end(), std::size_t{1}, std::multiplies<>());
  return LatticeField(std::move(extents), std::move(spacing), std::vector<double>(sites, 0.0));
}

double LatticeField::cell_volume() const {
  return std::accumulate(spacing_.begin(), spacing_.end(), 1.0, std::multiplies<>());
}

double LatticeField::volume() const {
  double v = 1.0;
  for (std::size_t axis = 0; axis < extents_.size(); ++axis) {
    v *= static_cast<double>(extents_[axis]) * spacing_[axis];
  }
  return v;
}

bool LatticeField::same_geometry(const LatticeField& other) const {
  return extents_ == other.extents_ && spacing_ == other.spacing_;
}

double relaxation_rate(const MediumParams& params, double k) {
  return params.D0() * k * k / params.c0();
}

double noise_strength(const MediumParams& params, double k) {
  const double T0 = params.T0();
  const double c0 = params.c0();
  return params.D0() * k * k * T0 * T0 / (c0 * c0);
}

double coupling_constant(const MediumParams& params, double k) {
  if (k == 0.0) throw SingularModeError("A_k diverges for the conserved k = 0 mode");
  return params.c0() * params.c0() / (params.D0() * k * k * params.T0());
}

double equilibrium_mode_variance(const MediumParams& params) {
  return params.T0() * params.T0() / params.c0();
}

namespace {

void require_dimension(const MediumParams& params, const LatticeField& field) {
  if (field.dimension() != params.dimension()) {
    throw DimensionMismatchError("field dimension " + std::to_string(field.dimension()) +
                                 " does not match medium dimension " + std::to_string(params.dimension()));
  }
}

long double sum_of_squares(std::span<const double> values) {
  long double sum = 0.0L;
  for (double v : values) sum += static_cast<long double>(v) * v;
  return sum;
}

// Delta F before rounding to double. The Hessian check differences this
// directly; in double the four-point off-diagonal stencil loses about
// eps * |Delta F| / h^2 to cancellation.
long double free_energy_extended(const MediumParams& params, const LatticeField& field) {
  return static_cast<long double>(params.c0()) / (2.0L * params.T0()) * field.cell_volume() *
         sum_of_squares(field.values());
}

}  // namespace

double free_energy_change(const MediumParams& params, const LatticeField& field) {
  require_dimension(params, field);
  return static_cast<double>(free_energy_extended(params, field));
}

double equilibrium_log_density(const MediumParams& params, const LatticeField& field) {
  return -params.beta0() * free_energy_change(params, field);
}

HessianCheck free_energy_hessian_check(const MediumParams& params, const LatticeField& field,
                                       std::optional<double> step) {
  require_dimension(params, field);
  double h = 0.0;
  if (step) {
    h = *step;
  } else {
    double largest = 1.0;
    for (double v : field.values()) largest = std::max(largest, std::abs(v));
    h = 1e-3 * largest;
  }
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be > 0");

  HessianCheck check;
  check.expected_diagonal = params.c0() / params.T0() * field.cell_volume();

  LatticeField probe = field;
  auto values = probe.values();
  const std::size_t n = values.size();
  const long double f0 = free_energy_extended(params, probe);

  // F evaluated with site i shifted by si*h and site j by sj*h.
  auto shifted = [&](std::size_t i, double si, std::size_t j, double sj) {
    const double xi = values[i];
    const double xj = values[j];
    values[i] += si * h;
    values[j] += sj * h;
    const long double f = free_energy_extended(params, probe);
    values[i] = xi;
    values[j] = xj;
    return f;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const double xi = values[i];
    values[i] = xi + h;
    const long double fp = free_energy_extended(params, probe);
    values[i] = xi - h;
    const long double fm = free_energy_extended(params, probe);
    values[i] = xi;
    const double diag = static_cast<double>((fp - 2.0L * f0 + fm) / (static_cast<long double>(h) * h));
    check.max_diagonal_relative = std::max(
        check.max_diagonal_relative, std::abs(diag - check.expected_diagonal) / check.expected_diagonal);

    for (std::size_t j = i + 1; j < n; ++j) {
      const double off = static_cast<double>(
          (shifted(i, 1, j, 1) - shifted(i, 1, j, -1) - shifted(i, -1, j, 1) + shifted(i, -1, j, -1)) /
          (4.0L * h * h));
      check.max_off_diagonal_abs = std::max(check.max_off_diagonal_abs, std::abs(off));
    }
  }
  return check;
}

}  // namespace heatdeco
