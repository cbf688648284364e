// SPDX-License-Identifier: Apache-2.0

#include "faults.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "error.hpp"

namespace msfault {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void validate_rate(double rate) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    std::ostringstream os;
    os << "rate outside [0, 1]: " << rate;
    fail(ErrorCode::OutOfRange, os.str());
  }
}

void mark_independent(Grid<std::uint8_t>& mask, int count, Rng& rng) {
  std::vector<int> idx(mask.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < count; ++i) {
    const auto j = i + static_cast<int>(rng.uniform_below(idx.size() - i));
    std::swap(idx[i], idx[j]);
    mask.data()[idx[i]] = 1;
  }
}

void mark_clustered(Grid<std::uint8_t>& mask, int count, CellIndex seed, Rng& rng) {
  if (!mask.contains(seed)) fail(ErrorCode::OutOfRange, "cluster seed outside grid");
  // BFS layers on a full rectangle are Manhattan-distance rings.
  const int max_d = std::max(seed.row, mask.rows() - 1 - seed.row) + std::max(seed.col, mask.cols() - 1 - seed.col);
  int remaining = count;
  for (int d = 0; d <= max_d && remaining > 0; ++d) {
    std::vector<CellIndex> ring;
    for (int r = 0; r < mask.rows(); ++r) {
      for (int c = 0; c < mask.cols(); ++c) {
        if (std::abs(r - seed.row) + std::abs(c - seed.col) == d) ring.push_back({r, c});
      }
    }
    if (static_cast<int>(ring.size()) > remaining) {
      for (int i = 0; i < remaining; ++i) {
        const auto j = i + static_cast<int>(rng.uniform_below(ring.size() - i));
        std::swap(ring[i], ring[j]);
      }
      ring.resize(remaining);
    }
    for (auto c : ring) mask[c] = 1;
    remaining -= static_cast<int>(ring.size());
  }
}

void mark_aligned(Grid<std::uint8_t>& mask, int count, Rng& rng) {
  std::vector<int> free_rows(mask.rows()), free_cols(mask.cols());
  std::iota(free_rows.begin(), free_rows.end(), 0);
  std::iota(free_cols.begin(), free_cols.end(), 0);
  int marked = 0;
  while (marked < count) {
    bool use_row = rng.coin();
    if (use_row && free_rows.empty()) use_row = false;
    if (!use_row && free_cols.empty()) use_row = true;
    auto& pool = use_row ? free_rows : free_cols;
    const auto pick = rng.uniform_below(pool.size());
    const int line = pool[pick];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));

    std::vector<CellIndex> cells;
    const int len = use_row ? mask.cols() : mask.rows();
    for (int k = 0; k < len; ++k) {
      const CellIndex c = use_row ? CellIndex{line, k} : CellIndex{k, line};
      if (!mask[c]) cells.push_back(c);
    }
    if (marked + static_cast<int>(cells.size()) > count) {
      if (rng.coin()) std::reverse(cells.begin(), cells.end());
      cells.resize(count - marked);
    }
    for (auto c : cells) mask[c] = 1;
    marked += static_cast<int>(cells.size());
  }
}

}  // namespace

char type_letter(const ErrorType& type) noexcept {
  return std::visit(overloaded{[](const Stuck&) { return 'S'; }, [](const OutOfState&) { return 'O'; },
                               [](const Deterministic&) { return 'D'; }, [](const Biased&) { return 'B'; }},
                    type);
}

char distribution_letter(const SpatialDistribution& distribution) noexcept {
  return std::visit(overloaded{[](const Independent&) { return 'I'; }, [](const Clustered&) { return 'C'; },
                               [](const Aligned&) { return 'A'; }, [](const StateSpecific&) { return 'S'; }},
                    distribution);
}

std::string ErrorScenario::acronym() const { return {distribution_letter(distribution), type_letter(type)}; }

ErrorType parse_error_type(std::string_view name) {
  if (name == "stuck" || name == "S") return Stuck{};
  if (name == "out" || name == "O") return OutOfState{};
  if (name == "det" || name == "D") return Deterministic{};
  if (name == "biased" || name == "B") return Biased{};
  fail(ErrorCode::Parse, "unknown error type '" + std::string(name) + "' (expected stuck|out|det|biased)");
}

SpatialDistribution parse_distribution(std::string_view name) {
  if (name == "ind" || name == "I") return Independent{};
  if (name == "clu" || name == "C") return Clustered{};
  if (name == "ali" || name == "A") return Aligned{};
  if (name == "sta" || name == "S") return StateSpecific{};
  fail(ErrorCode::Parse, "unknown distribution '" + std::string(name) + "' (expected ind|clu|ali|sta)");
}

std::pair<ErrorType, SpatialDistribution> parse_acronym(std::string_view acronym) {
  if (acronym.size() != 2) fail(ErrorCode::Parse, "scenario acronym must have two letters: '" + std::string(acronym) + "'");
  return {parse_error_type(acronym.substr(1, 1)), parse_distribution(acronym.substr(0, 1))};
}

int faulty_cell_count(double rate, int cells) {
  validate_rate(rate);
  return std::min(cells, static_cast<int>(std::floor(rate * cells + 0.5 + 1e-9)));
}

Grid<std::uint8_t> select_faulty_cells(const ErrorScenario& scenario, const CodingGrid& coding, Rng& rng) {
  validate_rate(scenario.rate);
  Grid<std::uint8_t> mask(coding.cells.rows(), coding.cells.cols(), 0);
  const int count = faulty_cell_count(scenario.rate, static_cast<int>(mask.size()));
  std::visit(overloaded{
                 [&](const Independent&) { mark_independent(mask, count, rng); },
                 [&](const Clustered& c) {
                   const CellIndex centre{(mask.rows() - 1) / 2, (mask.cols() - 1) / 2};
                   mark_clustered(mask, count, c.seed.value_or(centre), rng);
                 },
                 [&](const Aligned&) { mark_aligned(mask, count, rng); },
                 [&](const StateSpecific& s) {
                   if (s.target_states.empty()) fail(ErrorCode::InvalidArgument, "state-specific target set is empty");
                   for (int t : s.target_states) {
                     if (t < 0 || static_cast<std::size_t>(t) >= coding.palette.size())
                       fail(ErrorCode::OutOfRange, "state-specific target outside palette");
                   }
                   if (scenario.rate == 0.0) return;
                   for (std::size_t i = 0; i < mask.size(); ++i) {
                     const int state = coding.cells.data()[i];
                     if (std::find(s.target_states.begin(), s.target_states.end(), state) != s.target_states.end())
                       mask.data()[i] = 1;
                   }
                 },
             },
             scenario.distribution);
  return mask;
}

UnitCellResponse realize_fault(const ErrorType& type, std::size_t original_state, const StatePalette& palette,
                               Rng& rng) {
  if (original_state >= palette.size()) fail(ErrorCode::OutOfRange, "original state outside palette");
  return std::visit(
      overloaded{
          [&](const Stuck&) { return palette.state(rng.uniform_below(palette.size())); },
          [&](const OutOfState& o) {
            const double phi = 360.0 * rng.uniform01();
            const double gamma = o.amplitude == OutOfState::Amplitude::Uniform
                                     ? rng.uniform01()
                                     : o.nominal_gamma.value_or(palette.nominal_gamma());
            return make_response(gamma, phi);
          },
          [&](const Deterministic& d) {
            return d.value ? make_response(d.value->gamma, d.value->phi_deg) : palette.state(0);
          },
          [&](const Biased& b) {
            const auto n = static_cast<long long>(palette.size());
            const long long s = ((static_cast<long long>(original_state) + b.delta) % n + n) % n;
            return palette.state(static_cast<std::size_t>(s));
          },
      },
      type);
}

Injection apply_scenario(const CodingGrid& coding, const ErrorScenario& scenario) {
  coding.validate();
  Rng rng(scenario.seed);
  Injection out{realize_coding(coding), {select_faulty_cells(scenario, coding, rng), {}}};
  for (int r = 0; r < coding.cells.rows(); ++r) {
    for (int c = 0; c < coding.cells.cols(); ++c) {
      if (!out.faults.mask(r, c)) continue;
      const auto resp = realize_fault(scenario.type, coding.cells(r, c), coding.palette, rng);
      out.grid.cells(r, c) = resp;
      out.faults.realized.push_back({{r, c}, resp});
    }
  }
  return out;
}

}  // namespace msfault
