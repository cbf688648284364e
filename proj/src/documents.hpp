// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "coding.hpp"
#include "farfield.hpp"
#include "faults.hpp"
#include "metrics.hpp"
#include "palette.hpp"
#include "sweep.hpp"

namespace msfault {

/// Shortest text that parses back to the same double; "nan" for NaN.
std::string format_number(double value);

// JSON documents. Readers throw Error(Parse) on malformed input.

/// Palette: [{"label": "s0", "gamma": 0.9, "phi_deg": 45}, ...]. An object
/// with a "states" array is accepted as well.
nlohmann::json palette_to_json(const StatePalette& palette);
StatePalette palette_from_json(const nlohmann::json& doc);

/// Coding: geometry, target, embedded palette and the row-major index grid.
nlohmann::json coding_to_json(const CodingGrid& coding);
CodingGrid coding_from_json(const nlohmann::json& doc);

/// Realized reflection grid with an optional fault mask.
nlohmann::json reflection_to_json(const ReflectionGrid& grid, const Grid<std::uint8_t>* mask = nullptr);
ReflectionGrid reflection_from_json(const nlohmann::json& doc);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

// CSV tables.

/// "# reference_peak=<x>" then theta_deg,phi_deg,magnitude,db rows.
void write_pattern_csv(std::ostream& out, const FarFieldPattern& pattern, double floor_db = kDefaultFloorDb);
/// Inverse of write_pattern_csv; the angular grid is recovered from the rows.
FarFieldPattern read_pattern_csv(std::istream& in);

inline constexpr const char* kMetricsCsvHeader =
    "scenario,rate,trial,td_deg,d_target_db,d_actual_db,sll_db,sll_max_db,sla_db,hpbw_deg,n_lobes,flags";
void write_metrics_row(std::ostream& out, const std::string& scenario, double rate, int trial,
                       const MetricsReport& report);
void write_trials_csv(std::ostream& out, const std::vector<TrialRow>& rows);

inline constexpr const char* kSweepCsvHeader = "scenario,rate,metric,mean,std,min,max,n,flagged";
void write_sweep_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

/// Plan, seed, version, golden metrics and timing of a sweep.
nlohmann::json sweep_manifest(const SweepResult& result, const CodingGrid& coding, const std::string& version);

}  // namespace msfault
