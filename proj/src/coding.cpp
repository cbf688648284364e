// SPDX-License-Identifier: Apache-2.0

#include "coding.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "error.hpp"

namespace msfault {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

double MetasurfaceGeometry::wavenumber() const noexcept { return 2.0 * std::numbers::pi / wavelength_m; }

void MetasurfaceGeometry::validate() const {
  if (n_rows < 1 || n_cols < 1) fail(ErrorCode::InvalidArgument, "grid needs at least one row and one column");
  if (n_rows > 4096 || n_cols > 4096) fail(ErrorCode::OutOfRange, "grid dimensions exceed 4096");
  if (!(cell_size_m > 0.0) || !std::isfinite(cell_size_m))
    fail(ErrorCode::InvalidArgument, "cell size must be positive");
  if (!(wavelength_m > 0.0) || !std::isfinite(wavelength_m))
    fail(ErrorCode::InvalidArgument, "wavelength must be positive");
}

MetasurfaceGeometry MetasurfaceGeometry::from_frequency(int n_rows, int n_cols, double cell_size_m,
                                                        double frequency_hz) {
  if (!(frequency_hz > 0.0)) fail(ErrorCode::InvalidArgument, "frequency must be positive");
  MetasurfaceGeometry g{n_rows, n_cols, cell_size_m, kSpeedOfLight / frequency_hz};
  g.validate();
  return g;
}

void SteeringTarget::validate() const {
  if (!(theta_deg >= 0.0 && theta_deg < 90.0)) {
    std::ostringstream os;
    os << "target theta " << theta_deg << " deg outside [0, 90)";
    fail(ErrorCode::OutOfRange, os.str());
  }
  if (!(phi_deg >= 0.0 && phi_deg < 360.0)) {
    std::ostringstream os;
    os << "target phi " << phi_deg << " deg outside [0, 360)";
    fail(ErrorCode::OutOfRange, os.str());
  }
}

double required_phase(const MetasurfaceGeometry& geometry, const SteeringTarget& target, int m, int n) {
  if (m < 1 || m > geometry.n_rows || n < 1 || n > geometry.n_cols)
    fail(ErrorCode::OutOfRange, "cell index outside grid");
  const double st = std::sin(target.theta_deg * kDegToRad);
  const double ux = std::cos(target.phi_deg * kDegToRad) * st;
  const double uy = std::sin(target.phi_deg * kDegToRad) * st;
  const double scale = 360.0 * geometry.cell_size_m / geometry.wavelength_m;
  return canonical_phase(scale * (m * ux + n * uy));
}

void CodingGrid::validate() const {
  geometry.validate();
  if (cells.rows() != geometry.n_rows || cells.cols() != geometry.n_cols)
    fail(ErrorCode::InvalidArgument, "coding grid dimensions do not match geometry");
  for (auto s : cells.data()) {
    if (s >= palette.size()) fail(ErrorCode::OutOfRange, "coding references a state outside the palette");
  }
}

CodingGrid generate_coding(const MetasurfaceGeometry& geometry, const SteeringTarget& target,
                           const StatePalette& palette) {
  geometry.validate();
  target.validate();
  if (palette.size() > 255) fail(ErrorCode::OutOfRange, "palette larger than 255 states");
  CodingGrid coding{geometry, target, palette, Grid<std::uint8_t>(geometry.n_rows, geometry.n_cols)};
  for (int r = 0; r < geometry.n_rows; ++r) {
    for (int c = 0; c < geometry.n_cols; ++c) {
      coding.cells(r, c) = static_cast<std::uint8_t>(palette.nearest_state(required_phase(geometry, target, r + 1, c + 1)));
    }
  }
  return coding;
}

}  // namespace msfault
