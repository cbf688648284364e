// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "coding.hpp"
#include "grid.hpp"
#include "palette.hpp"

namespace msfault {

/// Realized reflection coefficients, possibly outside the palette.
struct ReflectionGrid {
  MetasurfaceGeometry geometry;
  Grid<UnitCellResponse> cells;

  void validate() const;
  friend bool operator==(const ReflectionGrid&, const ReflectionGrid&) = default;
};

/// Fault-free realization: every cell carries its coded state's response.
ReflectionGrid realize_coding(const CodingGrid& coding);

/// Uniformly spaced sampling of the upper hemisphere.
struct AngularGrid {
  double theta_start_deg = 0.0;
  double theta_step_deg = 1.0;
  int n_theta = 91;
  double phi_start_deg = 0.0;
  double phi_step_deg = 1.0;
  int n_phi = 360;

  /// theta 0..90 inclusive, phi 0..360 exclusive, both at `step_deg`.
  static AngularGrid hemisphere(double step_deg = 1.0);

  double theta(int i) const noexcept { return theta_start_deg + i * theta_step_deg; }
  double phi(int j) const noexcept { return phi_start_deg + j * phi_step_deg; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_theta) * n_phi; }
  /// True when the phi samples cover the full circle, so the axis wraps.
  bool phi_wraps() const noexcept;
  void validate() const;
};

/// Element (unit-cell) pattern, angles in degrees.
using ElementFactor = std::function<double(double theta_deg, double phi_deg)>;

/// cos(theta) over the upper hemisphere, exactly zero at the horizon.
double cosine_element(double theta_deg, double phi_deg);

/// Scattered far field for normal plane-wave incidence with unit constant:
///   E = EF(theta) * sum_mn  Gamma_mn exp(j[Phi_mn - k0 zeta_mn(theta, phi)])
///   zeta_mn = D sin(theta) [(m - 1/2) cos(phi) + (n - 1/2) sin(phi)]
/// The minus sign fixes the phase reference so that the coding gradient
/// steers toward +phi_r. Summation is row-major.
std::complex<double> field_at(const ReflectionGrid& grid, double theta_deg, double phi_deg,
                              const ElementFactor& element = cosine_element);

/// Repeated point evaluation of one reflection grid; caches the cell phasors.
class FieldProbe {
 public:
  explicit FieldProbe(const ReflectionGrid& grid, ElementFactor element = cosine_element);

  std::complex<double> field(double theta_deg, double phi_deg) const;
  double magnitude(double theta_deg, double phi_deg) const { return std::abs(field(theta_deg, phi_deg)); }

 private:
  MetasurfaceGeometry geometry_;
  ElementFactor element_;
  std::vector<std::complex<double>> cells_;
};

struct FarFieldPattern {
  AngularGrid grid;
  std::vector<double> magnitude;  // row-major, theta-major
  double reference_peak = 0.0;    // linear magnitude treated as 0 dB

  double at(int i, int j) const { return magnitude[static_cast<std::size_t>(i) * grid.n_phi + j]; }
  std::size_t argmax() const;  // first index of the maximum
  double max() const;
};

/// Evaluates many reflection grids over one angular grid. The per-angle
/// row/column phasors are tabulated once, so each pattern costs O(N*M) per
/// angle with no transcendental calls. Immutable after construction.
class PatternEvaluator {
 public:
  PatternEvaluator(const MetasurfaceGeometry& geometry, AngularGrid angular,
                   ElementFactor element = cosine_element);

  const AngularGrid& angular() const noexcept { return angular_; }
  const MetasurfaceGeometry& geometry() const noexcept { return geometry_; }

  /// reference_peak defaults to the pattern's own maximum.
  FarFieldPattern evaluate(const ReflectionGrid& grid, std::optional<double> reference = {}) const;

 private:
  MetasurfaceGeometry geometry_;
  AngularGrid angular_;
  std::vector<double> element_;  // per angle
  // Phasor tables split into real and imaginary parts, [theta][row or col][phi].
  std::vector<double> row_re_, row_im_;
  std::vector<double> col_re_, col_im_;
};

FarFieldPattern evaluate_pattern(const ReflectionGrid& grid, const AngularGrid& angular,
                                 std::optional<double> reference = {});

inline constexpr double kDefaultFloorDb = -100.0;

/// 20 log10(magnitude / reference), clamped below at `floor_db`.
double to_db(double magnitude, double reference, double floor_db = kDefaultFloorDb);
std::vector<double> to_db(const FarFieldPattern& pattern, double reference, double floor_db = kDefaultFloorDb);

}  // namespace msfault
