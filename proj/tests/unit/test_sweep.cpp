// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "sweep.hpp"

using namespace msfault;

namespace {

CodingGrid default_coding() { return generate_coding(MetasurfaceGeometry{}, {45, 45}); }

const SummaryRow& find(const std::vector<SummaryRow>& rows, std::string_view scenario, double rate, Metric m) {
  for (const auto& r : rows)
    if (r.scenario == scenario && r.rate == rate && r.metric == m) return r;
  FAIL("summary row missing");
  return rows.front();
}

TrialRow row(std::string scenario, int rate_index, double rate, double td, unsigned flags = 0) {
  TrialRow t;
  t.scenario = std::move(scenario);
  t.rate_index = rate_index;
  t.rate = rate;
  t.metrics.td_deg = td;
  t.metrics.flags = flags;
  return t;
}

}  // namespace

TEST_SUITE("sweep") {
  TEST_CASE("rate ranges") {
    const auto r = rate_range(0.0, 0.5, 0.01);
    REQUIRE(r.size() == 51);
    CHECK(r[30] == 0.3);
    CHECK(r.back() == 0.5);
    CHECK(rate_range(0.25, 0.45, 0.01).size() == 21);
    CHECK(rate_range(0.1, 0.1, 0.05) == std::vector<double>{0.1});
    CHECK_THROWS_AS(rate_range(0.0, 0.5, 0.0), Error);
    CHECK_THROWS_AS(rate_range(0.5, 0.0, 0.1), Error);
  }

  TEST_CASE("metric names round-trip") {
    for (auto m : kAllMetrics) CHECK(parse_metric(metric_name(m)) == m);
    CHECK(metric_name(Metric::DTarget) == "d_target");
    CHECK_THROWS_AS(parse_metric("gain"), Error);
  }

  TEST_CASE("table scenarios") {
    std::vector<std::string> names;
    for (const auto& s : table_scenarios()) names.push_back(s.acronym);
    CHECK(names == std::vector<std::string>{"CS", "CO", "CD", "CB", "IS", "IO", "ID", "IB"});
    CHECK(scenario_from_acronym("AB").acronym == "AB");
    CHECK_THROWS_AS(scenario_from_acronym("XY"), Error);
  }

  TEST_CASE("plan validation") {
    auto plan = SweepPlan::defaults();
    CHECK(plan.scenarios.size() == 8);
    CHECK(plan.rates.size() == 51);
    CHECK(plan.trials == 100);
    CHECK_NOTHROW(plan.validate());
    auto bad = plan;
    bad.rates = {0.2, 0.1};
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = plan;
    bad.rates = {1.5};
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = plan;
    bad.trials = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = plan;
    bad.scenarios.clear();
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = plan;
    bad.jobs = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
  }

  TEST_CASE("aggregate of one trial has zero spread") {
    const std::vector<TrialRow> rows{row("ID", 0, 0.1, 3.0)};
    const auto s = aggregate(rows);
    const auto& td = find(s, "ID", 0.1, Metric::Td);
    CHECK(td.mean == 3.0);
    CHECK(td.std == 0.0);
    CHECK(td.n == 1);
  }

  TEST_CASE("aggregate of identical values is exact") {
    std::vector<TrialRow> rows;
    for (int i = 0; i < 7; ++i) rows.push_back(row("ID", 0, 0.3, 0.1));
    const auto& td = find(aggregate(rows), "ID", 0.3, Metric::Td);
    CHECK(td.mean == 0.1);
    CHECK(td.std == 0.0);
    CHECK(td.min == 0.1);
    CHECK(td.max == 0.1);
  }

  TEST_CASE("aggregate statistics and exclusions") {
    std::vector<TrialRow> rows{row("CD", 2, 0.2, 1.0), row("CD", 2, 0.2, 2.0), row("CD", 2, 0.2, 3.0),
                               row("CD", 2, 0.2, 50.0, kFlagSingleLobe), row("CD", 2, 0.2, 99.0, kFlagError)};
    const auto s = aggregate(rows);
    const auto& td = find(s, "CD", 0.2, Metric::Td);
    CHECK(td.n == 5);
    CHECK(td.flagged == 1);
    CHECK(td.mean == doctest::Approx(14.0));
    const auto& sll_row = find(s, "CD", 0.2, Metric::Sll);
    CHECK(sll_row.flagged == 2);
    CHECK(sll_row.n == 5);
    std::vector<TrialRow> three(rows.begin(), rows.begin() + 3);
    const auto& t3 = find(aggregate(three), "CD", 0.2, Metric::Td);
    CHECK(t3.mean == doctest::Approx(2.0));
    CHECK(t3.std == doctest::Approx(1.0));
    CHECK(t3.min == 1.0);
    CHECK(t3.max == 3.0);
  }

  TEST_CASE("metric exclusions follow the flags") {
    auto r = row("ID", 0, 0.1, 1.0, kFlagHpbwCapped);
    CHECK(metric_excluded(r, Metric::Hpbw));
    CHECK_FALSE(metric_excluded(r, Metric::Sll));
    r.metrics.flags = kFlagPole;
    for (auto m : kAllMetrics) CHECK_FALSE(metric_excluded(r, m));
    r.metrics.flags = kFlagError;
    for (auto m : kAllMetrics) CHECK(metric_excluded(r, m));
  }

  TEST_CASE("zero rate reproduces the golden metrics for every scenario") {
    const auto coding = default_coding();
    SweepPlan plan;
    plan.scenarios = table_scenarios();
    plan.rates = {0.0};
    plan.trials = 2;
    plan.root_seed = 11;
    plan.keep_trials = true;
    const auto angular = AngularGrid::hemisphere(2.0);
    const auto res = run_sweep(coding, plan, angular);
    CHECK(res.errors == 0);
    for (const auto& s : res.summary) {
      CHECK(s.std == 0.0);
      CHECK(s.flagged == 0);
    }
    for (const auto& t : res.trials) {
      CHECK(t.metrics.td_deg == res.golden.td_deg);
      CHECK(t.metrics.d_actual_db == 0.0);
      CHECK(t.metrics.sll_db == res.golden.sll_db);
      CHECK(t.metrics.hpbw_deg == res.golden.hpbw_deg);
      CHECK(t.emergent_rate == 0.0);
    }
  }

  TEST_CASE("state-specific deterministic faults do not vary between trials") {
    const auto coding = default_coding();
    SweepPlan plan;
    plan.scenarios = {scenario_from_acronym("SD")};
    plan.rates = {0.3};
    plan.trials = 10;
    plan.root_seed = 5;
    const auto res = run_sweep(coding, plan, AngularGrid::hemisphere(3.0));
    for (const auto& s : res.summary) CHECK(s.std == 0.0);
  }

  TEST_CASE("results do not depend on the number of workers") {
    const auto coding = default_coding();
    SweepPlan plan;
    plan.scenarios = {scenario_from_acronym("ID"), scenario_from_acronym("CB")};
    plan.rates = {0.1, 0.3};
    plan.trials = 3;
    plan.root_seed = 77;
    plan.keep_trials = true;
    const auto angular = AngularGrid::hemisphere(3.0);
    auto p3 = plan;
    p3.jobs = 3;
    const auto a = run_sweep(coding, plan, angular);
    const auto b = run_sweep(coding, p3, angular);
    REQUIRE(a.trials.size() == b.trials.size());
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
      CHECK(a.trials[i].seed == b.trials[i].seed);
      for (auto m : kAllMetrics) CHECK(metric_value(a.trials[i], m) == metric_value(b.trials[i], m));
    }
    REQUIRE(a.summary.size() == b.summary.size());
    for (std::size_t i = 0; i < a.summary.size(); ++i) {
      CHECK(a.summary[i].mean == b.summary[i].mean);
      CHECK(a.summary[i].std == b.summary[i].std);
    }
  }

  TEST_CASE("trial seeds differ across scenarios, rates and trials") {
    const auto coding = default_coding();
    SweepPlan plan;
    plan.scenarios = {scenario_from_acronym("ID"), scenario_from_acronym("IB")};
    plan.rates = {0.1, 0.2};
    plan.trials = 3;
    plan.root_seed = 1;
    plan.keep_trials = true;
    const auto res = run_sweep(coding, plan, AngularGrid::hemisphere(5.0));
    std::vector<std::uint64_t> seeds;
    for (const auto& t : res.trials) seeds.push_back(t.seed);
    std::sort(seeds.begin(), seeds.end());
    CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
  }

  TEST_CASE("emergent rate tracks the requested rate") {
    const auto coding = default_coding();
    const PatternEvaluator ev(coding.geometry, AngularGrid::hemisphere(5.0));
    const auto golden = golden_reference(coding, ev);
    const auto t = run_trial(coding, ev, golden, scenario_from_acronym("IS"), 0.2, 0, 0, 3);
    CHECK(t.error.empty());
    CHECK(t.emergent_rate <= 0.2 + 1e-12);
    CHECK(t.emergent_rate >= 0.0);
  }

  TEST_CASE("golden reference is the refined peak") {
    const auto coding = default_coding();
    const PatternEvaluator ev(coding.geometry, AngularGrid::hemisphere());
    const auto g = golden_reference(coding, ev);
    CHECK(g.reference >= g.pattern.max());
    CHECK(g.metrics.d_actual_db == 0.0);
    CHECK(g.metrics.peak_magnitude == g.reference);
  }
}
