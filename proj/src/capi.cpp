// SPDX-License-Identifier: Apache-2.0

#include "msfault/msfault.h"

#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "coding.hpp"
#include "documents.hpp"
#include "error.hpp"
#include "farfield.hpp"
#include "faults.hpp"
#include "metrics.hpp"
#include "palette.hpp"
#include "sweep.hpp"

#ifndef MSFAULT_VERSION
#define MSFAULT_VERSION "0.0.0"
#endif

struct msf_palette {
  msfault::StatePalette value;
};
struct msf_coding {
  msfault::CodingGrid value;
};
struct msf_reflection {
  msfault::ReflectionGrid value;
  std::optional<msfault::Grid<std::uint8_t>> mask;
};
struct msf_pattern {
  msfault::FarFieldPattern value;
};
struct msf_sweep {
  msfault::SweepResult value;
  msfault::CodingGrid coding;
};

namespace {

using namespace msfault;

thread_local std::string g_last_error;

struct NullPointer {};

msf_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return MSF_ERR_INVALID_ARGUMENT;
    case ErrorCode::OutOfRange: return MSF_ERR_OUT_OF_RANGE;
    case ErrorCode::Parse: return MSF_ERR_PARSE;
    case ErrorCode::Io: return MSF_ERR_IO;
    case ErrorCode::Runtime: return MSF_ERR_RUNTIME;
  }
  return MSF_ERR_RUNTIME;
}

template <class F>
msf_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return MSF_OK;
  } catch (const NullPointer&) {
    g_last_error = "null pointer argument";
    return MSF_ERR_NULL_POINTER;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MSF_ERR_RUNTIME;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MSF_ERR_RUNTIME;
  }
}

template <class... Ps>
void require(const Ps*... ps) {
  if (((ps == nullptr) || ...)) throw NullPointer{};
}

MetasurfaceGeometry from_c(const msf_geometry& g) {
  return MetasurfaceGeometry::from_frequency(g.n_rows, g.n_cols, g.cell_size_m, g.frequency_hz);
}

msf_geometry to_c(const MetasurfaceGeometry& g) {
  return {g.n_rows, g.n_cols, g.cell_size_m, kSpeedOfLight / g.wavelength_m};
}

AngularGrid from_c(const msf_angular* a) {
  if (!a) return AngularGrid::hemisphere();
  AngularGrid g{a->theta_start_deg, a->theta_step_deg, a->n_theta, a->phi_start_deg, a->phi_step_deg, a->n_phi};
  g.validate();
  return g;
}

msf_angular to_c(const AngularGrid& g) {
  return {g.theta_start_deg, g.theta_step_deg, g.n_theta, g.phi_start_deg, g.phi_step_deg, g.n_phi};
}

MetricsOptions from_c(const msf_metrics_options* o) {
  MetricsOptions m;
  if (!o) return m;
  m.lobes.floor_db = o->lobe_floor_db;
  m.floor_db = o->floor_db;
  m.refine_step_deg = o->refine_step_deg;
  m.refine_half_window_deg = o->refine_half_window_deg;
  m.sla = o->sla == MSF_SLA_PEAK_SUM ? SlaConvention::PeakSum : SlaConvention::IntegratedPower;
  m.beam.level_db = o->hpbw_level_db;
  m.beam.march_step_deg = o->hpbw_march_step_deg;
  m.beam.pole_theta_deg = o->pole_theta_deg;
  if (!(m.refine_step_deg > 0.0) || !(m.beam.march_step_deg > 0.0) || m.refine_half_window_deg < 0.0)
    fail(ErrorCode::InvalidArgument, "metric step sizes must be positive");
  return m;
}

msf_metrics to_c(const MetricsReport& r) {
  return {r.td_deg,      r.d_target_db,       r.d_actual_db,     r.sll_db,         r.sll_max_db, r.sla_db,
          r.hpbw_deg,    r.actual.theta_deg, r.actual.phi_deg, r.peak_magnitude, r.n_lobes,    r.flags};
}

ErrorScenario from_c(const msf_scenario& s) {
  ErrorScenario e;
  switch (s.type) {
    case MSF_TYPE_STUCK: e.type = Stuck{}; break;
    case MSF_TYPE_OUT_OF_STATE:
      e.type = OutOfState{s.out_uniform_amplitude ? OutOfState::Amplitude::Uniform : OutOfState::Amplitude::Nominal, {}};
      break;
    case MSF_TYPE_DETERMINISTIC:
      e.type = Deterministic{s.det_has_value ? std::optional(make_response(s.det_gamma, s.det_phi_deg)) : std::nullopt};
      break;
    case MSF_TYPE_BIASED: e.type = Biased{s.biased_delta}; break;
    default: fail(ErrorCode::InvalidArgument, "unknown error type");
  }
  switch (s.distribution) {
    case MSF_DIST_INDEPENDENT: e.distribution = Independent{}; break;
    case MSF_DIST_CLUSTERED:
      e.distribution = Clustered{s.cluster_has_seed ? std::optional(CellIndex{s.cluster_row, s.cluster_col})
                                                    : std::nullopt};
      break;
    case MSF_DIST_ALIGNED: e.distribution = Aligned{}; break;
    case MSF_DIST_STATE_SPECIFIC: {
      StateSpecific st;
      if (s.target_states) st.target_states.assign(s.target_states, s.target_states + s.n_target_states);
      e.distribution = st;
      break;
    }
    default: fail(ErrorCode::InvalidArgument, "unknown spatial distribution");
  }
  e.rate = s.rate;
  e.seed = s.seed;
  return e;
}

template <class F>
void with_output(const char* path, F&& write) {
  if (std::strcmp(path, "-") == 0) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, std::string("cannot write ") + path);
  write(out);
  if (!out) fail(ErrorCode::Io, std::string("write failed: ") + path);
}

void copy_text(char* dst, std::size_t size, std::string_view src) {
  const std::size_t n = std::min(size - 1, src.size());
  std::memcpy(dst, src.data(), n);
  dst[n] = '\0';
}

msf_summary_row to_c(const SummaryRow& r) {
  msf_summary_row out{};
  copy_text(out.scenario, sizeof out.scenario, r.scenario);
  copy_text(out.metric, sizeof out.metric, metric_name(r.metric));
  out.rate = r.rate;
  out.mean = r.mean;
  out.std = r.std;
  out.min = r.min;
  out.max = r.max;
  out.n = r.n;
  out.flagged = r.flagged;
  return out;
}

}  // namespace

extern "C" {

const char* msf_version(void) { return MSFAULT_VERSION; }

const char* msf_last_error(void) { return g_last_error.c_str(); }

const char* msf_status_name(msf_status status) {
  switch (status) {
    case MSF_OK: return "ok";
    case MSF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MSF_ERR_OUT_OF_RANGE: return "out of range";
    case MSF_ERR_PARSE: return "parse error";
    case MSF_ERR_IO: return "i/o error";
    case MSF_ERR_RUNTIME: return "runtime error";
    case MSF_ERR_NULL_POINTER: return "null pointer";
  }
  return "unknown";
}

void msf_geometry_default(msf_geometry* geometry) {
  if (geometry) *geometry = {15, 15, 2e-3, 25e9};
}

msf_status msf_angular_hemisphere(double step_deg, msf_angular* out) {
  return guarded([&] {
    require(out);
    *out = to_c(AngularGrid::hemisphere(step_deg));
  });
}

msf_status msf_palette_default(msf_palette** out) {
  return guarded([&] {
    require(out);
    *out = new msf_palette{default_palette()};
  });
}

msf_status msf_palette_create(const double* gamma, const double* phi_deg, const char* const* labels, size_t n,
                              msf_palette** out) {
  return guarded([&] {
    require(gamma, phi_deg, out);
    std::vector<UnitCellResponse> states;
    std::vector<std::string> names;
    for (size_t i = 0; i < n; ++i) {
      states.push_back({gamma[i], phi_deg[i]});
      if (labels) names.emplace_back(labels[i] ? labels[i] : "");
    }
    *out = new msf_palette{StatePalette(std::move(states), std::move(names))};
  });
}

msf_status msf_palette_load(const char* path, msf_palette** out) {
  return guarded([&] {
    require(path, out);
    *out = new msf_palette{palette_from_json(read_json(path))};
  });
}

msf_status msf_palette_save(const msf_palette* palette, const char* path) {
  return guarded([&] {
    require(palette, path);
    with_output(path, [&](std::ostream& os) { os << palette_to_json(palette->value).dump(2) << '\n'; });
  });
}

size_t msf_palette_size(const msf_palette* palette) { return palette ? palette->value.size() : 0; }

msf_status msf_palette_state(const msf_palette* palette, size_t index, double* gamma, double* phi_deg) {
  return guarded([&] {
    require(palette);
    const auto& s = palette->value.state(index);
    if (gamma) *gamma = s.gamma;
    if (phi_deg) *phi_deg = s.phi_deg;
  });
}

msf_status msf_palette_nearest(const msf_palette* palette, double phi_deg, size_t* index) {
  return guarded([&] {
    require(palette, index);
    *index = palette->value.nearest_state(phi_deg);
  });
}

void msf_palette_free(msf_palette* palette) { delete palette; }

msf_status msf_coding_generate(const msf_geometry* geometry, const msf_target* target, const msf_palette* palette,
                               msf_coding** out) {
  return guarded([&] {
    require(geometry, target, out);
    const SteeringTarget t{target->theta_deg, target->phi_deg};
    *out = new msf_coding{generate_coding(from_c(*geometry), t, palette ? palette->value : default_palette())};
  });
}

msf_status msf_coding_load(const char* path, msf_coding** out) {
  return guarded([&] {
    require(path, out);
    *out = new msf_coding{coding_from_json(read_json(path))};
  });
}

msf_status msf_coding_save(const msf_coding* coding, const char* path) {
  return guarded([&] {
    require(coding, path);
    with_output(path, [&](std::ostream& os) { os << coding_to_json(coding->value).dump(2) << '\n'; });
  });
}

msf_status msf_coding_geometry(const msf_coding* coding, msf_geometry* out) {
  return guarded([&] {
    require(coding, out);
    *out = to_c(coding->value.geometry);
  });
}

msf_status msf_coding_target(const msf_coding* coding, msf_target* out) {
  return guarded([&] {
    require(coding, out);
    *out = {coding->value.target.theta_deg, coding->value.target.phi_deg};
  });
}

msf_status msf_coding_cell(const msf_coding* coding, int row, int col, int* state) {
  return guarded([&] {
    require(coding, state);
    if (!coding->value.cells.contains({row, col})) fail(ErrorCode::OutOfRange, "cell outside grid");
    *state = coding->value.cells(row, col);
  });
}

void msf_coding_free(msf_coding* coding) { delete coding; }

void msf_scenario_default(msf_scenario* s) {
  if (!s) return;
  *s = msf_scenario{};
  s->type = MSF_TYPE_STUCK;
  s->distribution = MSF_DIST_INDEPENDENT;
  s->biased_delta = 1;
  s->det_gamma = 0.9;
  s->det_phi_deg = 45.0;
}

msf_status msf_scenario_from_acronym(const char* acronym, msf_scenario* s) {
  return guarded([&] {
    require(acronym, s);
    const auto [type, dist] = parse_acronym(acronym);
    s->type = static_cast<msf_error_type>(type.index());
    s->distribution = static_cast<msf_distribution>(dist.index());
  });
}

msf_status msf_reflection_from_coding(const msf_coding* coding, msf_reflection** out) {
  return guarded([&] {
    require(coding, out);
    *out = new msf_reflection{realize_coding(coding->value), std::nullopt};
  });
}

msf_status msf_inject(const msf_coding* coding, const msf_scenario* scenario, msf_reflection** out,
                      size_t* n_faulty) {
  return guarded([&] {
    require(coding, scenario, out);
    Injection inj = apply_scenario(coding->value, from_c(*scenario));
    if (n_faulty) *n_faulty = inj.faults.count();
    *out = new msf_reflection{std::move(inj.grid), std::move(inj.faults.mask)};
  });
}

msf_status msf_reflection_load(const char* path, msf_reflection** out) {
  return guarded([&] {
    require(path, out);
    const auto doc = read_json(path);
    auto grid = reflection_from_json(doc);
    std::optional<Grid<std::uint8_t>> mask;
    if (doc.contains("mask")) {
      Grid<std::uint8_t> m(grid.geometry.n_rows, grid.geometry.n_cols);
      try {
        for (int r = 0; r < m.rows(); ++r)
          for (int c = 0; c < m.cols(); ++c) m(r, c) = doc["mask"].at(r).at(c).get<int>() != 0;
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Parse, std::string("malformed mask: ") + e.what());
      }
      mask = std::move(m);
    }
    *out = new msf_reflection{std::move(grid), std::move(mask)};
  });
}

msf_status msf_reflection_save(const msf_reflection* grid, const char* path) {
  return guarded([&] {
    require(grid, path);
    const auto doc = reflection_to_json(grid->value, grid->mask ? &*grid->mask : nullptr);
    with_output(path, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  });
}

msf_status msf_reflection_cell(const msf_reflection* grid, int row, int col, double* gamma, double* phi_deg,
                               int* faulty) {
  return guarded([&] {
    require(grid);
    if (!grid->value.cells.contains({row, col})) fail(ErrorCode::OutOfRange, "cell outside grid");
    const auto& c = grid->value.cells(row, col);
    if (gamma) *gamma = c.gamma;
    if (phi_deg) *phi_deg = c.phi_deg;
    if (faulty) *faulty = grid->mask ? (*grid->mask)(row, col) : 0;
  });
}

void msf_reflection_free(msf_reflection* grid) { delete grid; }

msf_status msf_pattern_evaluate(const msf_reflection* grid, const msf_angular* angular, const double* reference,
                                msf_pattern** out) {
  return guarded([&] {
    require(grid, out);
    std::optional<double> ref;
    if (reference) {
      if (!(*reference > 0.0)) fail(ErrorCode::InvalidArgument, "normalization reference must be positive");
      ref = *reference;
    }
    *out = new msf_pattern{evaluate_pattern(grid->value, from_c(angular), ref)};
  });
}

msf_status msf_pattern_load_csv(const char* path, msf_pattern** out) {
  return guarded([&] {
    require(path, out);
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, std::string("cannot open ") + path);
    *out = new msf_pattern{read_pattern_csv(in)};
  });
}

msf_status msf_pattern_save_csv(const msf_pattern* pattern, const char* path, double floor_db) {
  return guarded([&] {
    require(pattern, path);
    with_output(path, [&](std::ostream& os) { write_pattern_csv(os, pattern->value, floor_db); });
  });
}

msf_status msf_pattern_angular(const msf_pattern* pattern, msf_angular* out) {
  return guarded([&] {
    require(pattern, out);
    *out = to_c(pattern->value.grid);
  });
}

msf_status msf_pattern_value(const msf_pattern* pattern, int i_theta, int i_phi, double* magnitude) {
  return guarded([&] {
    require(pattern, magnitude);
    const auto& g = pattern->value.grid;
    if (i_theta < 0 || i_theta >= g.n_theta || i_phi < 0 || i_phi >= g.n_phi)
      fail(ErrorCode::OutOfRange, "sample index outside pattern");
    *magnitude = pattern->value.at(i_theta, i_phi);
  });
}

msf_status msf_pattern_reference(const msf_pattern* pattern, double* reference) {
  return guarded([&] {
    require(pattern, reference);
    *reference = pattern->value.reference_peak;
  });
}

msf_status msf_pattern_argmax(const msf_pattern* pattern, double* theta_deg, double* phi_deg, double* magnitude) {
  return guarded([&] {
    require(pattern);
    const auto& p = pattern->value;
    const auto a = p.argmax();
    const int i = static_cast<int>(a / p.grid.n_phi), j = static_cast<int>(a % p.grid.n_phi);
    if (theta_deg) *theta_deg = p.grid.theta(i);
    if (phi_deg) *phi_deg = p.grid.phi(j);
    if (magnitude) *magnitude = p.magnitude[a];
  });
}

void msf_pattern_free(msf_pattern* pattern) { delete pattern; }

void msf_metrics_options_default(msf_metrics_options* o) {
  if (!o) return;
  const MetricsOptions m;
  *o = {m.lobes.floor_db,     m.floor_db,           m.refine_step_deg, m.refine_half_window_deg, MSF_SLA_INTEGRATED_POWER,
        m.beam.level_db, m.beam.march_step_deg, m.beam.pole_theta_deg};
}

msf_status msf_metrics_compute(const msf_reflection* grid, const msf_angular* angular, const msf_target* target,
                               double reference, const msf_metrics_options* options, msf_metrics* out) {
  return guarded([&] {
    require(grid, target, out);
    const SteeringTarget t{target->theta_deg, target->phi_deg};
    t.validate();
    const PatternEvaluator ev(grid->value.geometry, from_c(angular));
    *out = to_c(analyze(grid->value, ev, t, reference, from_c(options)));
  });
}

msf_status msf_metrics_from_pattern(const msf_pattern* pattern, const msf_target* target, double reference,
                                    const msf_metrics_options* options, msf_metrics* out) {
  return guarded([&] {
    require(pattern, target, out);
    const SteeringTarget t{target->theta_deg, target->phi_deg};
    t.validate();
    *out = to_c(compute_metrics(pattern->value, t, reference, nullptr, from_c(options)));
  });
}

msf_status msf_golden(const msf_coding* coding, const msf_angular* angular, const msf_metrics_options* options,
                      msf_metrics* out, double* reference) {
  return guarded([&] {
    require(coding);
    const PatternEvaluator ev(coding->value.geometry, from_c(angular));
    const auto g = golden_reference(coding->value, ev, from_c(options));
    if (out) *out = to_c(g.metrics);
    if (reference) *reference = g.reference;
  });
}

size_t msf_flags_string(unsigned flags, char* buffer, size_t size) {
  const std::string s = flags_to_string(flags);
  if (buffer && size > 0) copy_text(buffer, size, s);
  return s.size();
}

void msf_sweep_plan_default(msf_sweep_plan* plan) {
  if (!plan) return;
  static const char* const kScenarios[] = {"CS", "CO", "CD", "CB", "IS", "IO", "ID", "IB"};
  static const std::vector<double> kRates = rate_range(0.0, 0.5, 0.01);
  *plan = {kScenarios, 8, kRates.data(), kRates.size(), 100, 0, 1, 0};
}

msf_status msf_sweep_run(const msf_coding* coding, const msf_sweep_plan* plan, const msf_angular* angular,
                         const msf_metrics_options* options, msf_progress_fn progress, void* user, msf_sweep** out) {
  return guarded([&] {
    require(coding, plan, out);
    if (plan->n_scenarios > 0) require(plan->scenarios);
    if (plan->n_rates > 0) require(plan->rates);
    SweepPlan p;
    for (size_t i = 0; i < plan->n_scenarios; ++i) {
      require(plan->scenarios[i]);
      p.scenarios.push_back(scenario_from_acronym(plan->scenarios[i]));
    }
    p.rates.assign(plan->rates, plan->rates + plan->n_rates);
    p.trials = plan->trials;
    p.root_seed = plan->root_seed;
    p.jobs = plan->jobs;
    p.keep_trials = plan->keep_trials != 0;
    ProgressFn fn;
    if (progress) fn = [&](std::size_t d, std::size_t t) { progress(d, t, user); };
    auto result = run_sweep(coding->value, p, from_c(angular), from_c(options), fn);
    *out = new msf_sweep{std::move(result), coding->value};
  });
}

size_t msf_sweep_summary_count(const msf_sweep* sweep) { return sweep ? sweep->value.summary.size() : 0; }

msf_status msf_sweep_summary_row(const msf_sweep* sweep, size_t index, msf_summary_row* out) {
  return guarded([&] {
    require(sweep, out);
    if (index >= sweep->value.summary.size()) fail(ErrorCode::OutOfRange, "summary row index out of range");
    *out = to_c(sweep->value.summary[index]);
  });
}

msf_status msf_sweep_lookup(const msf_sweep* sweep, const char* scenario, double rate, const char* metric,
                            msf_summary_row* out) {
  return guarded([&] {
    require(sweep, scenario, metric, out);
    const Metric m = parse_metric(metric);
    for (const auto& r : sweep->value.summary) {
      if (r.scenario == scenario && r.metric == m && std::abs(r.rate - rate) < 1e-9) {
        *out = to_c(r);
        return;
      }
    }
    fail(ErrorCode::OutOfRange, "no summary row for the requested key");
  });
}

size_t msf_sweep_trial_count(const msf_sweep* sweep) { return sweep ? sweep->value.trials.size() : 0; }

msf_status msf_sweep_trial(const msf_sweep* sweep, size_t index, msf_trial_row* out) {
  return guarded([&] {
    require(sweep, out);
    if (index >= sweep->value.trials.size()) fail(ErrorCode::OutOfRange, "trial index out of range");
    const auto& t = sweep->value.trials[index];
    *out = msf_trial_row{};
    copy_text(out->scenario, sizeof out->scenario, t.scenario);
    out->rate = t.rate;
    out->trial = t.trial;
    out->seed = t.seed;
    out->emergent_rate = t.emergent_rate;
    out->metrics = to_c(t.metrics);
  });
}

msf_status msf_sweep_golden(const msf_sweep* sweep, msf_metrics* out) {
  return guarded([&] {
    require(sweep, out);
    *out = to_c(sweep->value.golden);
  });
}

int msf_sweep_errors(const msf_sweep* sweep) { return sweep ? sweep->value.errors : 0; }

double msf_sweep_wall_seconds(const msf_sweep* sweep) { return sweep ? sweep->value.wall_seconds : 0.0; }

msf_status msf_sweep_write_csv(const msf_sweep* sweep, const char* path) {
  return guarded([&] {
    require(sweep, path);
    with_output(path, [&](std::ostream& os) { write_sweep_csv(os, sweep->value.summary); });
  });
}

msf_status msf_sweep_write_trials_csv(const msf_sweep* sweep, const char* path) {
  return guarded([&] {
    require(sweep, path);
    if (!sweep->value.plan.keep_trials) fail(ErrorCode::InvalidArgument, "sweep was run without keep_trials");
    with_output(path, [&](std::ostream& os) { write_trials_csv(os, sweep->value.trials); });
  });
}

msf_status msf_sweep_write_manifest(const msf_sweep* sweep, const char* path) {
  return guarded([&] {
    require(sweep, path);
    const auto doc = sweep_manifest(sweep->value, sweep->coding, MSFAULT_VERSION);
    with_output(path, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  });
}

void msf_sweep_free(msf_sweep* sweep) { delete sweep; }

}  // extern "C"
