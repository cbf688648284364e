// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "grid.hpp"
#include "palette.hpp"

namespace msfault {

inline constexpr double kSpeedOfLight = 299792458.0;

struct MetasurfaceGeometry {
  int n_rows = 15;
  int n_cols = 15;
  double cell_size_m = 2e-3;
  double wavelength_m = kSpeedOfLight / 25e9;

  double wavenumber() const noexcept;
  void validate() const;
  static MetasurfaceGeometry from_frequency(int n_rows, int n_cols, double cell_size_m, double frequency_hz);

  friend bool operator==(const MetasurfaceGeometry&, const MetasurfaceGeometry&) = default;
};

/// Reflection direction; theta in [0, 90), phi in [0, 360).
struct SteeringTarget {
  double theta_deg = 45.0;
  double phi_deg = 45.0;

  void validate() const;
  friend bool operator==(const SteeringTarget&, const SteeringTarget&) = default;
};

/// Phase (degrees, reduced to [0, 360)) the cell at 1-based row m, column n
/// must impose so that the surface gradient steers normal incidence toward
/// `target`:  (360 / lambda) * D * sin(theta_r) * (m cos(phi_r) + n sin(phi_r)).
double required_phase(const MetasurfaceGeometry& geometry, const SteeringTarget& target, int m, int n);

/// The metasurface "code": one palette index per cell, plus everything needed
/// to reproduce it.
struct CodingGrid {
  MetasurfaceGeometry geometry;
  SteeringTarget target;
  StatePalette palette = default_palette();
  Grid<std::uint8_t> cells;

  /// Throws unless dimensions match geometry and every index is a valid state.
  void validate() const;
  friend bool operator==(const CodingGrid&, const CodingGrid&) = default;
};

/// Nearest-state mapping of `required_phase` for every cell. Deterministic.
CodingGrid generate_coding(const MetasurfaceGeometry& geometry, const SteeringTarget& target,
                           const StatePalette& palette = default_palette());

}  // namespace msfault
