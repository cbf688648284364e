// SPDX-License-Identifier: Apache-2.0

#include "palette.hpp"

#include <cmath>
#include <sstream>

#include "error.hpp"

namespace msfault {

namespace {

// Phases closer than this are the same state; also the tie window of the
// nearest-state search.
constexpr double kPhaseTolDeg = 1e-9;

}  // namespace

double canonical_phase(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r = 0.0;  // -tiny + 360 rounds up to 360
  return r;
}

double circular_phase_distance(double a_deg, double b_deg) {
  const double d = std::fmod(std::abs(a_deg - b_deg), 360.0);
  return std::min(d, 360.0 - d);
}

UnitCellResponse make_response(double gamma, double phi_deg) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    std::ostringstream os;
    os << "amplitude out of range: gamma=" << gamma << " (expected 0 <= gamma <= 1)";
    fail(ErrorCode::OutOfRange, os.str());
  }
  if (!std::isfinite(phi_deg)) fail(ErrorCode::InvalidArgument, "phase is not finite");
  return {gamma, canonical_phase(phi_deg)};
}

StatePalette::StatePalette(std::vector<UnitCellResponse> states, std::vector<std::string> labels)
    : states_(std::move(states)), labels_(std::move(labels)) {
  if (states_.size() < 2) fail(ErrorCode::InvalidArgument, "palette needs at least two states");
  for (auto& s : states_) s = make_response(s.gamma, s.phi_deg);
  for (std::size_t i = 0; i < states_.size(); ++i) {
    for (std::size_t j = i + 1; j < states_.size(); ++j) {
      if (circular_phase_distance(states_[i].phi_deg, states_[j].phi_deg) < kPhaseTolDeg) {
        std::ostringstream os;
        os << "duplicate phases: states " << i << " and " << j << " both at " << states_[i].phi_deg << " deg";
        fail(ErrorCode::InvalidArgument, os.str());
      }
    }
  }
  if (labels_.empty()) {
    for (std::size_t i = 0; i < states_.size(); ++i) labels_.push_back("s" + std::to_string(i));
  } else if (labels_.size() != states_.size()) {
    fail(ErrorCode::InvalidArgument, "palette label count does not match state count");
  }
}

const UnitCellResponse& StatePalette::state(std::size_t i) const {
  if (i >= states_.size()) fail(ErrorCode::OutOfRange, "palette state index out of range");
  return states_[i];
}

const std::string& StatePalette::label(std::size_t i) const {
  if (i >= labels_.size()) fail(ErrorCode::OutOfRange, "palette label index out of range");
  return labels_[i];
}

double StatePalette::nominal_gamma() const noexcept {
  double sum = 0.0;
  for (const auto& s : states_) sum += s.gamma;
  return sum / static_cast<double>(states_.size());
}

std::size_t StatePalette::nearest_state(double phi_deg) const noexcept {
  std::size_t best = 0;
  double best_d = circular_phase_distance(phi_deg, states_[0].phi_deg);
  for (std::size_t i = 1; i < states_.size(); ++i) {
    const double d = circular_phase_distance(phi_deg, states_[i].phi_deg);
    if (d < best_d - kPhaseTolDeg) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

const StatePalette& default_palette() {
  static const StatePalette palette({{0.9, 45.0}, {0.9, 135.0}, {0.9, 225.0}, {0.9, 315.0}});
  return palette;
}

}  // namespace msfault
