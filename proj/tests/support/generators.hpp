// SPDX-License-Identifier: Apache-2.0
//
// Small seeded generators for property tests.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

#include "coding.hpp"
#include "farfield.hpp"
#include "palette.hpp"

namespace msfault::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  std::uint64_t u64() { return engine_(); }

  MetasurfaceGeometry geometry(int max_dim = 8) {
    MetasurfaceGeometry g;
    g.n_rows = integer(1, max_dim);
    g.n_cols = integer(1, max_dim);
    g.cell_size_m = uniform(0.5e-3, 5e-3);
    g.wavelength_m = uniform(5e-3, 30e-3);
    return g;
  }

  ReflectionGrid reflection(const MetasurfaceGeometry& g) {
    ReflectionGrid out{g, Grid<UnitCellResponse>(g.n_rows, g.n_cols)};
    for (auto& c : out.cells.data()) c = make_response(uniform(0.0, 1.0), uniform(0.0, 360.0));
    return out;
  }

  SteeringTarget target() { return {uniform(0.0, 89.0), uniform(0.0, 359.9)}; }

  /// Direction inside the upper hemisphere, horizon excluded.
  std::pair<double, double> direction() { return {uniform(0.0, 89.9), uniform(0.0, 360.0)}; }

 private:
  std::mt19937_64 engine_;
};

/// Term-by-term evaluation of the array factor, written independently of the
/// library: cos(theta) * sum_mn gamma exp(j[phi_mn - k D sin(theta)((m-1/2)cos(phi) + (n-1/2)sin(phi))]).
inline std::complex<double> naive_field(const ReflectionGrid& grid, double theta_deg, double phi_deg) {
  const double pi = std::numbers::pi;
  const double th = theta_deg * pi / 180.0, ph = phi_deg * pi / 180.0;
  const double k = 2.0 * pi / grid.geometry.wavelength_m;
  const double d = grid.geometry.cell_size_m;
  double re = 0.0, im = 0.0;
  for (int m = 1; m <= grid.geometry.n_rows; ++m) {
    for (int n = 1; n <= grid.geometry.n_cols; ++n) {
      const auto& c = grid.cells(m - 1, n - 1);
      const double zeta = d * std::sin(th) * ((m - 0.5) * std::cos(ph) + (n - 0.5) * std::sin(ph));
      const double arg = c.phi_deg * pi / 180.0 - k * zeta;
      re += c.gamma * std::cos(arg);
      im += c.gamma * std::sin(arg);
    }
  }
  const double ef = theta_deg >= 90.0 ? 0.0 : std::cos(th);
  return {ef * re, ef * im};
}

inline double relative_error(std::complex<double> a, std::complex<double> b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace msfault::testing
