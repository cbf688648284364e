// SPDX-License-Identifier: Apache-2.0

#include "sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "error.hpp"

namespace msfault {

GoldenReference golden_reference(const CodingGrid& coding, const PatternEvaluator& evaluator,
                                 const MetricsOptions& options) {
  GoldenReference g{realize_coding(coding), {}, {}, 0.0};
  g.pattern = evaluator.evaluate(g.grid);
  const FieldProbe probe(g.grid);
  FieldSampler exact = [&](Direction d) { return probe.magnitude(d.theta_deg, d.phi_deg); };
  // First pass locates the refined peak, second pass normalizes to it.
  const MetricsReport first = compute_metrics(g.pattern, coding.target, g.pattern.max(), &exact, options);
  g.reference = first.peak_magnitude;
  g.pattern.reference_peak = g.reference;
  g.metrics = compute_metrics(g.pattern, coding.target, g.reference, &exact, options);
  return g;
}

ScenarioSpec scenario_from_acronym(std::string_view acronym) {
  auto [type, dist] = parse_acronym(acronym);
  ScenarioSpec s{"", std::move(type), std::move(dist)};
  s.acronym = ErrorScenario{s.type, s.distribution, 0.0, 0}.acronym();
  return s;
}

std::vector<ScenarioSpec> table_scenarios() {
  std::vector<ScenarioSpec> out;
  for (const char* a : {"CS", "CO", "CD", "CB", "IS", "IO", "ID", "IB"}) out.push_back(scenario_from_acronym(a));
  return out;
}

std::vector<double> rate_range(double start, double stop, double step) {
  if (!(step > 0.0)) fail(ErrorCode::InvalidArgument, "rate step must be positive");
  if (!(stop >= start)) fail(ErrorCode::InvalidArgument, "rate range is empty");
  std::vector<double> out;
  const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9));
  for (int k = 0; k <= n; ++k) out.push_back(std::round((start + k * step) * 1e12) / 1e12);
  return out;
}

void SweepPlan::validate() const {
  if (scenarios.empty()) fail(ErrorCode::InvalidArgument, "sweep plan has no scenarios");
  if (rates.empty()) fail(ErrorCode::InvalidArgument, "sweep plan has no rates");
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!(rates[i] >= 0.0 && rates[i] <= 1.0)) fail(ErrorCode::OutOfRange, "sweep rates must lie in [0, 1]");
    if (i > 0 && !(rates[i] > rates[i - 1])) fail(ErrorCode::InvalidArgument, "sweep rates must be ascending");
  }
  if (trials < 1) fail(ErrorCode::InvalidArgument, "trials must be at least 1");
  if (jobs < 1) fail(ErrorCode::InvalidArgument, "jobs must be at least 1");
}

SweepPlan SweepPlan::defaults() {
  SweepPlan p;
  p.scenarios = table_scenarios();
  p.rates = rate_range(0.0, 0.5, 0.01);
  return p;
}

std::string_view metric_name(Metric metric) noexcept {
  switch (metric) {
    case Metric::Td: return "td";
    case Metric::DTarget: return "d_target";
    case Metric::DActual: return "d_actual";
    case Metric::Sll: return "sll";
    case Metric::SllMax: return "sll_max";
    case Metric::Sla: return "sla";
    case Metric::Hpbw: return "hpbw";
    case Metric::ThetaA: return "theta_a";
    case Metric::PhiA: return "phi_a";
    case Metric::NLobes: return "n_lobes";
    case Metric::EmergentRate: return "emergent_rate";
  }
  return "";
}

Metric parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics) {
    if (metric_name(m) == name) return m;
  }
  fail(ErrorCode::Parse, "unknown metric: " + std::string(name));
}

double metric_value(const TrialRow& row, Metric metric) noexcept {
  const auto& r = row.metrics;
  switch (metric) {
    case Metric::Td: return r.td_deg;
    case Metric::DTarget: return r.d_target_db;
    case Metric::DActual: return r.d_actual_db;
    case Metric::Sll: return r.sll_db;
    case Metric::SllMax: return r.sll_max_db;
    case Metric::Sla: return r.sla_db;
    case Metric::Hpbw: return r.hpbw_deg;
    case Metric::ThetaA: return r.actual.theta_deg;
    case Metric::PhiA: return r.actual.phi_deg;
    case Metric::NLobes: return r.n_lobes;
    case Metric::EmergentRate: return row.emergent_rate;
  }
  return 0.0;
}

bool metric_excluded(const TrialRow& row, Metric metric) noexcept {
  const unsigned f = row.metrics.flags;
  if (f & kFlagError) return true;
  switch (metric) {
    case Metric::Sll:
    case Metric::SllMax:
    case Metric::Sla: return (f & kFlagSingleLobe) != 0;
    case Metric::Hpbw: return (f & kFlagHpbwCapped) != 0;
    default: return false;
  }
}

std::vector<SummaryRow> aggregate(std::span<const TrialRow> rows) {
  if (rows.empty()) fail(ErrorCode::InvalidArgument, "nothing to aggregate");
  std::vector<std::pair<std::string, int>> keys;
  std::map<std::pair<std::string, int>, std::vector<const TrialRow*>> groups;
  for (const auto& r : rows) {
    auto key = std::make_pair(r.scenario, r.rate_index);
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) keys.push_back(key);
    it->second.push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (const auto& key : keys) {
    const auto& cell = groups[key];
    for (Metric m : kAllMetrics) {
      SummaryRow s{key.first, cell.front()->rate, m, 0.0, 0.0, 0.0, 0.0, static_cast<int>(cell.size()), 0};
      std::vector<double> v;
      for (const TrialRow* r : cell) {
        if (metric_excluded(*r, m)) {
          ++s.flagged;
        } else {
          v.push_back(metric_value(*r, m));
        }
      }
      if (v.empty()) {
        s.mean = s.std = s.min = s.max = std::numeric_limits<double>::quiet_NaN();
      } else {
        // Shifted by the first value so identical samples give an exact mean.
        double shift = 0.0;
        for (double x : v) shift += x - v.front();
        s.mean = v.front() + shift / v.size();
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.std = v.size() > 1 ? std::sqrt(ss / (v.size() - 1)) : 0.0;
        s.min = *std::min_element(v.begin(), v.end());
        s.max = *std::max_element(v.begin(), v.end());
      }
      out.push_back(s);
    }
  }
  return out;
}

TrialRow run_trial(const CodingGrid& coding, const PatternEvaluator& evaluator, const GoldenReference& golden,
                   const ScenarioSpec& scenario, double rate, int rate_index, int trial, std::uint64_t root_seed,
                   const MetricsOptions& options) {
  TrialRow row;
  row.scenario = scenario.acronym;
  row.rate_index = rate_index;
  row.rate = rate;
  row.trial = trial;
  row.seed = substream_seed(root_seed, scenario.acronym, static_cast<std::uint64_t>(rate_index),
                            static_cast<std::uint64_t>(trial));
  try {
    const ErrorScenario es{scenario.type, scenario.distribution, rate, row.seed};
    const Injection inj = apply_scenario(coding, es);
    row.emergent_rate = inj.faults.emergent_rate();
    row.metrics = analyze(inj.grid, evaluator, coding.target, golden.reference, options);
    row.metrics.lobes.clear();
  } catch (const std::exception& e) {
    row.metrics = MetricsReport{};
    row.metrics.flags = kFlagError;
    row.error = e.what();
  }
  return row;
}

SweepResult run_sweep(const CodingGrid& coding, const SweepPlan& plan, const AngularGrid& angular,
                      const MetricsOptions& options, const ProgressFn& progress) {
  plan.validate();
  coding.validate();
  const auto start = std::chrono::steady_clock::now();
  const PatternEvaluator evaluator(coding.geometry, angular);
  const GoldenReference golden = golden_reference(coding, evaluator, options);

  const std::size_t n_rates = plan.rates.size();
  const std::size_t total = plan.scenarios.size() * n_rates * static_cast<std::size_t>(plan.trials);
  std::vector<TrialRow> rows(total);
  std::atomic<std::size_t> next{0}, done{0};
  std::mutex progress_mutex;

  auto worker = [&] {
    for (std::size_t k = next++; k < total; k = next++) {
      const std::size_t t = k % plan.trials;
      const std::size_t r = (k / plan.trials) % n_rates;
      const std::size_t s = k / (plan.trials * n_rates);
      rows[k] = run_trial(coding, evaluator, golden, plan.scenarios[s], plan.rates[r], static_cast<int>(r),
                          static_cast<int>(t), plan.root_seed, options);
      const std::size_t d = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(d, total);
      }
    }
  };
  const int n_workers = static_cast<int>(std::min<std::size_t>(plan.jobs, std::max<std::size_t>(total, 1)));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  }

  SweepResult result;
  result.plan = plan;
  result.golden = golden.metrics;
  result.golden.lobes.clear();
  result.summary = aggregate(rows);
  result.errors = static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const TrialRow& r) {
    return (r.metrics.flags & kFlagError) != 0;
  }));
  if (plan.keep_trials) result.trials = std::move(rows);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace msfault
