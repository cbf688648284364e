// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "coding.hpp"
#include "farfield.hpp"
#include "grid.hpp"
#include "palette.hpp"
#include "rng.hpp"

namespace msfault {

// Error types: what a faulty cell does.

/// Stuck at a uniformly drawn valid state (possibly the intended one).
struct Stuck {};

/// Random invalid state: uniform phase, nominal or uniform amplitude.
struct OutOfState {
  enum class Amplitude { Nominal, Uniform };
  Amplitude amplitude = Amplitude::Nominal;
  std::optional<double> nominal_gamma;  // default: palette mean amplitude
};

/// Every faulty cell holds the same fixed response (default: state 0).
struct Deterministic {
  std::optional<UnitCellResponse> value;
};

/// Faulty cell sits `delta` states away from the intended one, cyclically.
struct Biased {
  int delta = 1;
};

using ErrorType = std::variant<Stuck, OutOfState, Deterministic, Biased>;

// Spatial distributions: which cells fail.

struct Independent {};
struct Clustered {
  std::optional<CellIndex> seed;  // default: grid centre
};
struct Aligned {};
struct StateSpecific {
  std::vector<int> target_states{1};
};

using SpatialDistribution = std::variant<Independent, Clustered, Aligned, StateSpecific>;

struct ErrorScenario {
  ErrorType type = Stuck{};
  SpatialDistribution distribution = Independent{};
  double rate = 0.0;
  std::uint64_t seed = 0;

  /// Two-letter code: distribution letter (C/I/A/S) then type letter (S/O/D/B).
  std::string acronym() const;
};

char type_letter(const ErrorType& type) noexcept;
char distribution_letter(const SpatialDistribution& distribution) noexcept;

/// Parses e.g. "CD" into default-parameter type and distribution.
std::pair<ErrorType, SpatialDistribution> parse_acronym(std::string_view acronym);
/// CLI spellings: stuck|out|det|biased and ind|clu|ali|sta (acronym letters accepted too).
ErrorType parse_error_type(std::string_view name);
SpatialDistribution parse_distribution(std::string_view name);

/// round(rate * cells), halves rounded up.
int faulty_cell_count(double rate, int cells);

/// Marks the faulty positions for `scenario` on the coding's grid.
/// Independent: uniform sample without replacement. Clustered: BFS rings
/// around the seed, random order within the last ring. Aligned: random whole
/// rows/columns, the last one truncated from a random end. StateSpecific: all
/// cells coded to a target state (rate only switches it off at 0).
Grid<std::uint8_t> select_faulty_cells(const ErrorScenario& scenario, const CodingGrid& coding, Rng& rng);

/// Response a faulty cell takes instead of `original_state`.
UnitCellResponse realize_fault(const ErrorType& type, std::size_t original_state, const StatePalette& palette,
                               Rng& rng);

struct FaultMask {
  Grid<std::uint8_t> mask;
  std::vector<std::pair<CellIndex, UnitCellResponse>> realized;  // row-major over masked cells

  std::size_t count() const noexcept { return realized.size(); }
  double emergent_rate() const noexcept {
    return mask.size() == 0 ? 0.0 : static_cast<double>(realized.size()) / static_cast<double>(mask.size());
  }
};

struct Injection {
  ReflectionGrid grid;
  FaultMask faults;
};

/// Full injection pipeline: count, placement, realization. A pure function of
/// (coding, scenario) including the seed.
Injection apply_scenario(const CodingGrid& coding, const ErrorScenario& scenario);

}  // namespace msfault
