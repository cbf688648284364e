// SPDX-License-Identifier: Apache-2.0

#include "farfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "error.hpp"

namespace msfault {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// out[m] = exp(-j u (m + 1/2)), by recurrence with an exact restart every 16 terms.
void ladder(double u, int n, std::complex<double>* out) {
  const std::complex<double> step = std::polar(1.0, -u);
  for (int m = 0; m < n; ++m) out[m] = (m % 16 == 0) ? std::polar(1.0, -u * (m + 0.5)) : out[m - 1] * step;
}

// exp(-j k D sin(theta) cos(phi) (m - 1/2)) for m = 1..rows and the matching
// sin(phi) column terms.
void fill_phasors(const MetasurfaceGeometry& g, double theta_deg, double phi_deg, std::complex<double>* rows,
                  std::complex<double>* cols) {
  const double kd = g.wavenumber() * g.cell_size_m * std::sin(theta_deg * kDegToRad);
  const double ux = kd * std::cos(phi_deg * kDegToRad);
  const double uy = kd * std::sin(phi_deg * kDegToRad);
  ladder(ux, g.n_rows, rows);
  ladder(uy, g.n_cols, cols);
}

std::vector<std::complex<double>> cell_phasors(const ReflectionGrid& grid) {
  std::vector<std::complex<double>> c(grid.cells.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& r = grid.cells.data()[i];
    c[i] = std::polar(r.gamma, r.phi_deg * kDegToRad);
  }
  return c;
}

// sum_m rows[m] * sum_n cells[m][n] * cols[n], spelled out in real arithmetic
// to keep the inner loop free of the complex-multiply NaN fallback.
std::complex<double> separable_sum(const std::complex<double>* cells, int n_rows, int n_cols,
                                   const std::complex<double>* rows, const std::complex<double>* cols) {
  double re = 0.0, im = 0.0;
  for (int m = 0; m < n_rows; ++m) {
    const std::complex<double>* row = cells + static_cast<std::size_t>(m) * n_cols;
    double ire = 0.0, iim = 0.0;
    for (int n = 0; n < n_cols; ++n) {
      const double a = row[n].real(), b = row[n].imag();
      const double c = cols[n].real(), d = cols[n].imag();
      ire += a * c - b * d;
      iim += a * d + b * c;
    }
    const double c = rows[m].real(), d = rows[m].imag();
    re += ire * c - iim * d;
    im += ire * d + iim * c;
  }
  return {re, im};
}

}  // namespace

void ReflectionGrid::validate() const {
  geometry.validate();
  if (cells.rows() != geometry.n_rows || cells.cols() != geometry.n_cols)
    fail(ErrorCode::InvalidArgument, "reflection grid dimensions do not match geometry");
  for (const auto& c : cells.data()) {
    if (!(c.gamma >= 0.0 && c.gamma <= 1.0)) fail(ErrorCode::OutOfRange, "amplitude out of range in reflection grid");
  }
}

ReflectionGrid realize_coding(const CodingGrid& coding) {
  coding.validate();
  ReflectionGrid out{coding.geometry, Grid<UnitCellResponse>(coding.cells.rows(), coding.cells.cols())};
  for (std::size_t i = 0; i < out.cells.size(); ++i) {
    out.cells.data()[i] = coding.palette.state(coding.cells.data()[i]);
  }
  return out;
}

AngularGrid AngularGrid::hemisphere(double step_deg) {
  if (!(step_deg > 0.0) || step_deg > 90.0) fail(ErrorCode::InvalidArgument, "angular step must be in (0, 90]");
  AngularGrid g;
  g.theta_step_deg = step_deg;
  g.phi_step_deg = step_deg;
  g.n_theta = static_cast<int>(std::floor(90.0 / step_deg + 1e-9)) + 1;
  g.n_phi = static_cast<int>(std::ceil(360.0 / step_deg - 1e-9));
  return g;
}

bool AngularGrid::phi_wraps() const noexcept {
  return std::abs(n_phi * phi_step_deg - 360.0) < 1e-9;
}

void AngularGrid::validate() const {
  if (n_theta < 1 || n_phi < 1) fail(ErrorCode::InvalidArgument, "empty angular grid");
  if (!(theta_step_deg > 0.0) || !(phi_step_deg > 0.0)) fail(ErrorCode::InvalidArgument, "angular spacing must be positive");
  if (theta_start_deg < 0.0 || theta(n_theta - 1) > 90.0 + 1e-9)
    fail(ErrorCode::OutOfRange, "theta samples must lie in [0, 90]");
  if (phi_start_deg < 0.0 || phi(n_phi - 1) >= 360.0 - 1e-12)
    fail(ErrorCode::OutOfRange, "phi samples must lie in [0, 360)");
}

double cosine_element(double theta_deg, double /*phi_deg*/) {
  if (theta_deg >= 90.0) return 0.0;
  return std::cos(theta_deg * kDegToRad);
}

std::complex<double> field_at(const ReflectionGrid& grid, double theta_deg, double phi_deg,
                              const ElementFactor& element) {
  return FieldProbe(grid, element).field(theta_deg, phi_deg);
}

FieldProbe::FieldProbe(const ReflectionGrid& grid, ElementFactor element)
    : geometry_(grid.geometry), element_(std::move(element)) {
  grid.validate();
  cells_ = cell_phasors(grid);
}

std::complex<double> FieldProbe::field(double theta_deg, double phi_deg) const {
  if (!(theta_deg >= 0.0 && theta_deg <= 90.0)) fail(ErrorCode::OutOfRange, "theta outside [0, 90]");
  const double ef = element_(theta_deg, phi_deg);
  if (ef == 0.0) return {};
  constexpr int kStack = 64;
  std::complex<double> rows_buf[kStack], cols_buf[kStack];
  std::vector<std::complex<double>> rows_heap, cols_heap;
  std::complex<double>* rows = rows_buf;
  std::complex<double>* cols = cols_buf;
  if (geometry_.n_rows > kStack) {
    rows_heap.resize(geometry_.n_rows);
    rows = rows_heap.data();
  }
  if (geometry_.n_cols > kStack) {
    cols_heap.resize(geometry_.n_cols);
    cols = cols_heap.data();
  }
  fill_phasors(geometry_, theta_deg, phi_deg, rows, cols);
  return ef * separable_sum(cells_.data(), geometry_.n_rows, geometry_.n_cols, rows, cols);
}

std::size_t FarFieldPattern::argmax() const {
  if (magnitude.empty()) fail(ErrorCode::InvalidArgument, "empty pattern");
  return static_cast<std::size_t>(std::max_element(magnitude.begin(), magnitude.end()) - magnitude.begin());
}

double FarFieldPattern::max() const { return magnitude[argmax()]; }

PatternEvaluator::PatternEvaluator(const MetasurfaceGeometry& geometry, AngularGrid angular, ElementFactor element)
    : geometry_(geometry), angular_(angular) {
  geometry_.validate();
  angular_.validate();
  const int np = angular_.n_phi, nr = geometry_.n_rows, nc = geometry_.n_cols;
  element_.resize(angular_.size());
  row_re_.resize(angular_.size() * nr);
  row_im_.resize(angular_.size() * nr);
  col_re_.resize(angular_.size() * nc);
  col_im_.resize(angular_.size() * nc);
  std::vector<std::complex<double>> rows(nr), cols(nc);
  for (int i = 0; i < angular_.n_theta; ++i) {
    for (int j = 0; j < np; ++j) {
      const std::size_t a = static_cast<std::size_t>(i) * np + j;
      element_[a] = element(angular_.theta(i), angular_.phi(j));
      fill_phasors(geometry_, angular_.theta(i), angular_.phi(j), rows.data(), cols.data());
      for (int m = 0; m < nr; ++m) {
        const std::size_t k = (static_cast<std::size_t>(i) * nr + m) * np + j;
        row_re_[k] = rows[m].real();
        row_im_[k] = rows[m].imag();
      }
      for (int n = 0; n < nc; ++n) {
        const std::size_t k = (static_cast<std::size_t>(i) * nc + n) * np + j;
        col_re_[k] = cols[n].real();
        col_im_[k] = cols[n].imag();
      }
    }
  }
}

FarFieldPattern PatternEvaluator::evaluate(const ReflectionGrid& grid, std::optional<double> reference) const {
  if (!(grid.geometry == geometry_)) fail(ErrorCode::InvalidArgument, "reflection grid geometry differs from evaluator");
  grid.validate();
  const auto cells = cell_phasors(grid);
  const int np = angular_.n_phi, nr = geometry_.n_rows, nc = geometry_.n_cols;
  FarFieldPattern out{angular_, std::vector<double>(angular_.size()), 0.0};
  std::vector<double> acc_re(np), acc_im(np), in_re(np), in_im(np);
  // One theta row at a time, phi innermost: same per-angle operation order
  // as separable_sum, laid out so the compiler can vectorize across phi.
  for (int i = 0; i < angular_.n_theta; ++i) {
    std::fill(acc_re.begin(), acc_re.end(), 0.0);
    std::fill(acc_im.begin(), acc_im.end(), 0.0);
    for (int m = 0; m < nr; ++m) {
      std::fill(in_re.begin(), in_re.end(), 0.0);
      std::fill(in_im.begin(), in_im.end(), 0.0);
      for (int n = 0; n < nc; ++n) {
        const double a = cells[static_cast<std::size_t>(m) * nc + n].real();
        const double b = cells[static_cast<std::size_t>(m) * nc + n].imag();
        const double* cr = &col_re_[(static_cast<std::size_t>(i) * nc + n) * np];
        const double* ci = &col_im_[(static_cast<std::size_t>(i) * nc + n) * np];
        for (int j = 0; j < np; ++j) {
          in_re[j] += a * cr[j] - b * ci[j];
          in_im[j] += a * ci[j] + b * cr[j];
        }
      }
      const double* rr = &row_re_[(static_cast<std::size_t>(i) * nr + m) * np];
      const double* ri = &row_im_[(static_cast<std::size_t>(i) * nr + m) * np];
      for (int j = 0; j < np; ++j) {
        acc_re[j] += in_re[j] * rr[j] - in_im[j] * ri[j];
        acc_im[j] += in_re[j] * ri[j] + in_im[j] * rr[j];
      }
    }
    for (int j = 0; j < np; ++j) {
      const std::size_t a = static_cast<std::size_t>(i) * np + j;
      out.magnitude[a] = element_[a] == 0.0 ? 0.0 : std::abs(element_[a] * std::complex<double>(acc_re[j], acc_im[j]));
    }
  }
  out.reference_peak = reference ? *reference : out.max();
  return out;
}

FarFieldPattern evaluate_pattern(const ReflectionGrid& grid, const AngularGrid& angular,
                                 std::optional<double> reference) {
  return PatternEvaluator(grid.geometry, angular).evaluate(grid, reference);
}

double to_db(double magnitude, double reference, double floor_db) {
  if (!(reference > 0.0)) fail(ErrorCode::InvalidArgument, "normalization reference must be positive");
  if (!(magnitude > 0.0)) return floor_db;
  return std::max(floor_db, 20.0 * std::log10(magnitude / reference));
}

std::vector<double> to_db(const FarFieldPattern& pattern, double reference, double floor_db) {
  if (!(reference > 0.0)) fail(ErrorCode::InvalidArgument, "normalization reference must be positive");
  std::vector<double> out(pattern.magnitude.size());
  std::transform(pattern.magnitude.begin(), pattern.magnitude.end(), out.begin(),
                 [&](double m) { return to_db(m, reference, floor_db); });
  return out;
}

}  // namespace msfault
