// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace msfault {

/// Complex reflection coefficient of one unit cell. Phase is kept in degrees,
/// canonical in [0, 360); radians only appear inside field evaluation.
struct UnitCellResponse {
  double gamma = 0.0;
  double phi_deg = 0.0;
  friend bool operator==(const UnitCellResponse&, const UnitCellResponse&) = default;
};

/// Checked constructor: gamma must lie in [0, 1]; phase is canonicalized.
UnitCellResponse make_response(double gamma, double phi_deg);

/// Reduces an angle to [0, 360).
double canonical_phase(double deg);

/// Shortest distance between two phases on the circle, in [0, 180].
double circular_phase_distance(double a_deg, double b_deg);

/// The discrete set of valid unit-cell states.
class StatePalette {
 public:
  /// Throws on fewer than two states, amplitude out of range or duplicate
  /// phases. Missing labels default to s0..s{N-1}.
  explicit StatePalette(std::vector<UnitCellResponse> states, std::vector<std::string> labels = {});

  std::size_t size() const noexcept { return states_.size(); }
  const UnitCellResponse& state(std::size_t i) const;
  std::span<const UnitCellResponse> states() const noexcept { return states_; }
  const std::string& label(std::size_t i) const;
  std::span<const std::string> labels() const noexcept { return labels_; }

  /// Mean amplitude over the states; used as the nominal out-of-state amplitude.
  double nominal_gamma() const noexcept;

  /// Index of the state whose phase is closest to `phi_deg` on the circle.
  /// Equidistant candidates resolve to the lower index.
  std::size_t nearest_state(double phi_deg) const noexcept;

  friend bool operator==(const StatePalette&, const StatePalette&) = default;

 private:
  std::vector<UnitCellResponse> states_;
  std::vector<std::string> labels_;
};

/// Four states, amplitude 0.9, phases 45/135/225/315 degrees.
const StatePalette& default_palette();

}  // namespace msfault
