// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coding.hpp"
#include "farfield.hpp"
#include "faults.hpp"
#include "metrics.hpp"

namespace msfault {

/// Fault-free pattern of a coding and its metrics. `reference` is the refined
/// main-lobe peak; every faulty pattern is normalized against it.
struct GoldenReference {
  ReflectionGrid grid;
  FarFieldPattern pattern;
  MetricsReport metrics;
  double reference = 0.0;
};

GoldenReference golden_reference(const CodingGrid& coding, const PatternEvaluator& evaluator,
                                 const MetricsOptions& options = {});

struct ScenarioSpec {
  std::string acronym;
  ErrorType type;
  SpatialDistribution distribution;
};

ScenarioSpec scenario_from_acronym(std::string_view acronym);
/// CS, CO, CD, CB, IS, IO, ID, IB.
std::vector<ScenarioSpec> table_scenarios();

/// start, start+step, ... up to stop inclusive; each value rounded to 1e-12.
std::vector<double> rate_range(double start, double stop, double step);

struct SweepPlan {
  std::vector<ScenarioSpec> scenarios;
  std::vector<double> rates;
  int trials = 100;
  std::uint64_t root_seed = 0;
  int jobs = 1;
  bool keep_trials = false;

  void validate() const;
  /// Eight table scenarios, rates 0..0.5 step 0.01, 100 trials.
  static SweepPlan defaults();
};

struct TrialRow {
  std::string scenario;
  int rate_index = 0;
  double rate = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  MetricsReport metrics;  // lobes dropped
  double emergent_rate = 0.0;
  std::string error;      // non-empty when the trial threw
};

enum class Metric { Td, DTarget, DActual, Sll, SllMax, Sla, Hpbw, ThetaA, PhiA, NLobes, EmergentRate };

inline constexpr Metric kAllMetrics[] = {Metric::Td,     Metric::DTarget, Metric::DActual, Metric::Sll,
                                         Metric::SllMax, Metric::Sla,     Metric::Hpbw,    Metric::ThetaA,
                                         Metric::PhiA,   Metric::NLobes,  Metric::EmergentRate};

std::string_view metric_name(Metric metric) noexcept;
Metric parse_metric(std::string_view name);
double metric_value(const TrialRow& row, Metric metric) noexcept;
/// True when the row's flags make `metric` meaningless for it.
bool metric_excluded(const TrialRow& row, Metric metric) noexcept;

struct SummaryRow {
  std::string scenario;
  double rate = 0.0;
  Metric metric = Metric::Td;
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
  int n = 0;        // trials in the cell
  int flagged = 0;  // trials left out of mean/std/min/max
};

/// Groups rows by (scenario, rate_index) in order of first appearance and
/// summarizes every metric. Sample standard deviation; 0 for a single value.
std::vector<SummaryRow> aggregate(std::span<const TrialRow> rows);

struct SweepResult {
  SweepPlan plan;
  MetricsReport golden;
  std::vector<SummaryRow> summary;
  std::vector<TrialRow> trials;  // filled when plan.keep_trials
  int errors = 0;
  double wall_seconds = 0.0;
};

/// Called after each finished trial with (done, total); may run on any worker.
using ProgressFn = std::function<void(std::size_t, std::size_t)>;

/// Runs every (scenario, rate, trial) of the plan. Each trial's RNG comes from
/// substream_seed(root_seed, acronym, rate_index, trial_index) and results are
/// stored by index, so the output does not depend on `jobs`.
SweepResult run_sweep(const CodingGrid& coding, const SweepPlan& plan,
                      const AngularGrid& angular = AngularGrid::hemisphere(), const MetricsOptions& options = {},
                      const ProgressFn& progress = {});

/// One trial of a sweep, exposed for tools and tests.
TrialRow run_trial(const CodingGrid& coding, const PatternEvaluator& evaluator, const GoldenReference& golden,
                   const ScenarioSpec& scenario, double rate, int rate_index, int trial, std::uint64_t root_seed,
                   const MetricsOptions& options = {});

}  // namespace msfault
