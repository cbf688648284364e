// SPDX-License-Identifier: Apache-2.0
//
// msfault command-line tool: coding, pattern evaluation, fault injection,
// metrics and Monte-Carlo sweeps.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "msfault/msfault.h"

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RuntimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(msf_status s) {
  if (s == MSF_OK) return;
  throw RuntimeError(std::string(msf_status_name(s)) + ": " + msf_last_error());
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Palette = std::unique_ptr<msf_palette, Deleter<msf_palette, msf_palette_free>>;
using Coding = std::unique_ptr<msf_coding, Deleter<msf_coding, msf_coding_free>>;
using Reflection = std::unique_ptr<msf_reflection, Deleter<msf_reflection, msf_reflection_free>>;
using Pattern = std::unique_ptr<msf_pattern, Deleter<msf_pattern, msf_pattern_free>>;
using Sweep = std::unique_ptr<msf_sweep, Deleter<msf_sweep, msf_sweep_free>>;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double to_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError(std::string("bad number for ") + what + ": '" + s + "'");
}

long long to_int(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw UsageError(std::string("bad integer for ") + what + ": '" + s + "'");
}

std::uint64_t to_seed(const std::string& s) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used, 0);
    if (used == s.size() && s.find('-') == std::string::npos) return v;
  } catch (const std::exception&) {
  }
  throw UsageError("bad seed: '" + s + "'");
}

// Options shared by the subcommands, filled from flags then from --config.
struct Options {
  std::string config;
  int jobs = 1;

  // surface
  std::string coding_in;
  int nx = 15, ny = 15;
  double cell_mm = 2.0;
  double freq_ghz = 25.0;
  double theta = 45.0, phi = 45.0;
  std::string palette;
  double step = 1.0;

  // scenario
  std::string inject;
  std::string type, dist;
  double rate = 0.0;
  std::string seed;
  int delta = 1;
  std::optional<double> det_gamma, det_phi;
  std::string cluster_seed;
  std::string target_states;
  bool uniform_amplitude = false;

  // outputs and analysis
  std::string output = "-";
  std::string reflection_in;
  std::string pattern_in;
  double floor_db = -100.0;
  bool with_metrics = false;
  std::string sla = "integrated";
  bool csv = false;

  // sweep
  std::string scenarios = "all";
  std::string rates = "0:0.5:0.01";
  int trials = 100;
  std::string trials_out;
  std::string manifest;
  bool progress = false;
};

struct Flags {
  CLI::App* app = nullptr;
  bool given(const std::string& name) const {
    try {
      return app->get_option(name)->count() > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  }
};

void add_surface(CLI::App* c, Options& o) {
  c->add_option("--coding", o.coding_in, "Coding document to use instead of generating one");
  c->add_option("--nx", o.nx, "Cells along x (rows)");
  c->add_option("--ny", o.ny, "Cells along y (columns)");
  c->add_option("--cell-mm", o.cell_mm, "Cell size in millimetres");
  c->add_option("--freq-ghz", o.freq_ghz, "Operating frequency in GHz");
  c->add_option("--theta", o.theta, "Target elevation, degrees in [0, 90)");
  c->add_option("--phi", o.phi, "Target azimuth, degrees in [0, 360)");
  c->add_option("--palette", o.palette, "Palette document");
}

void add_angular(CLI::App* c, Options& o) {
  c->add_option("--step", o.step, "Angular sampling step in degrees");
}

void add_scenario(CLI::App* c, Options& o) {
  c->add_option("--inject", o.inject, "Scenario shorthand: type,dist,rate[,key=value...]");
  c->add_option("--type", o.type, "Error type: stuck|out|det|biased");
  c->add_option("--dist", o.dist, "Spatial distribution: ind|clu|ali|sta");
  c->add_option("--rate", o.rate, "Fraction of faulty cells");
  c->add_option("--seed", o.seed, "Scenario seed (required when injecting)");
  c->add_option("--delta", o.delta, "Biased: state offset");
  c->add_option("--det-gamma", o.det_gamma, "Deterministic: amplitude");
  c->add_option("--det-phi", o.det_phi, "Deterministic: phase in degrees");
  c->add_option("--cluster-seed", o.cluster_seed, "Clustered: seed cell r,c");
  c->add_option("--target-states", o.target_states, "StateSpecific: comma-separated state indices");
  c->add_flag("--uniform-amplitude", o.uniform_amplitude, "OutOfState: amplitude uniform in [0, 1]");
}

void add_metric_options(CLI::App* c, Options& o) {
  c->add_option("--sla", o.sla, "Side-lobe accumulation: integrated|peak");
}

// Values from the config document fill whatever was not given on the command line.
void apply_config(Options& o, const Flags& f) {
  if (o.config.empty()) return;
  json doc;
  {
    std::ifstream in(o.config);
    if (!in) throw UsageError("cannot open config " + o.config);
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError("config: " + std::string(e.what()));
    }
  }
  auto take = [&](const json& j, const char* key, const std::string& flag, auto& field) {
    if (j.contains(key) && !f.given(flag)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
  };
  try {
    if (doc.contains("geometry")) {
      const auto& g = doc["geometry"];
      take(g, "n_rows", "--nx", o.nx);
      take(g, "n_cols", "--ny", o.ny);
      if (g.contains("cell_size_m") && !f.given("--cell-mm")) o.cell_mm = g["cell_size_m"].get<double>() * 1e3;
      if (g.contains("frequency_hz") && !f.given("--freq-ghz")) o.freq_ghz = g["frequency_hz"].get<double>() / 1e9;
    }
    if (doc.contains("target")) {
      take(doc["target"], "theta_deg", "--theta", o.theta);
      take(doc["target"], "phi_deg", "--phi", o.phi);
    }
    take(doc, "coding", "--coding", o.coding_in);
    take(doc, "palette", "--palette", o.palette);
    take(doc, "angular_step_deg", "--step", o.step);
    take(doc, "jobs", "--jobs", o.jobs);
    take(doc, "output", "--output", o.output);
    if (doc.contains("scenario")) {
      const auto& s = doc["scenario"];
      take(s, "type", "--type", o.type);
      take(s, "dist", "--dist", o.dist);
      take(s, "rate", "--rate", o.rate);
      if (s.contains("seed") && !f.given("--seed")) o.seed = std::to_string(s["seed"].get<std::uint64_t>());
      take(s, "delta", "--delta", o.delta);
      if (s.contains("det_gamma") && !f.given("--det-gamma")) o.det_gamma = s["det_gamma"].get<double>();
      if (s.contains("det_phi") && !f.given("--det-phi")) o.det_phi = s["det_phi"].get<double>();
      if (s.contains("cluster_seed") && !f.given("--cluster-seed")) {
        const auto& c = s["cluster_seed"];
        o.cluster_seed = std::to_string(c.at(0).get<int>()) + "," + std::to_string(c.at(1).get<int>());
      }
      if (s.contains("target_states") && !f.given("--target-states")) {
        std::string t;
        for (const auto& v : s["target_states"]) t += (t.empty() ? "" : ",") + std::to_string(v.get<int>());
        o.target_states = t;
      }
    }
    if (doc.contains("sweep")) {
      const auto& s = doc["sweep"];
      if (s.contains("scenarios") && !f.given("--scenarios")) {
        std::string t;
        for (const auto& v : s["scenarios"]) t += (t.empty() ? "" : ",") + v.get<std::string>();
        o.scenarios = t;
      }
      if (s.contains("rates") && !f.given("--rates")) {
        const auto& r = s["rates"];
        std::ostringstream t;
        t.precision(17);
        if (r.is_object()) {
          t << r.at("start").get<double>() << ':' << r.at("stop").get<double>() << ':' << r.at("step").get<double>();
        } else {
          for (std::size_t i = 0; i < r.size(); ++i) t << (i ? "," : "") << r[i].get<double>();
        }
        o.rates = t.str();
      }
      take(s, "trials", "--trials", o.trials);
      if (s.contains("seed") && !f.given("--seed")) o.seed = std::to_string(s["seed"].get<std::uint64_t>());
    }
  } catch (const json::exception& e) {
    throw UsageError("config: " + std::string(e.what()));
  }
}

msf_target target_of(const Options& o) {
  if (!(o.theta >= 0.0 && o.theta < 90.0)) throw UsageError("--theta must lie in [0, 90)");
  if (!(o.phi >= 0.0 && o.phi < 360.0)) throw UsageError("--phi must lie in [0, 360)");
  return {o.theta, o.phi};
}

Coding load_or_generate(const Options& o) {
  msf_coding* c = nullptr;
  if (!o.coding_in.empty()) {
    check(msf_coding_load(o.coding_in.c_str(), &c));
    return Coding(c);
  }
  if (o.nx < 1 || o.ny < 1) throw UsageError("--nx and --ny must be positive");
  if (!(o.cell_mm > 0.0) || !(o.freq_ghz > 0.0)) throw UsageError("--cell-mm and --freq-ghz must be positive");
  const msf_geometry g{o.nx, o.ny, o.cell_mm * 1e-3, o.freq_ghz * 1e9};
  const msf_target t = target_of(o);
  Palette pal;
  if (!o.palette.empty()) {
    msf_palette* p = nullptr;
    check(msf_palette_load(o.palette.c_str(), &p));
    pal.reset(p);
  }
  check(msf_coding_generate(&g, &t, pal.get(), &c));
  return Coding(c);
}

msf_angular angular_of(const Options& o) {
  if (!(o.step > 0.0 && o.step <= 90.0)) throw UsageError("--step must lie in (0, 90]");
  msf_angular a;
  check(msf_angular_hemisphere(o.step, &a));
  return a;
}

msf_metrics_options metric_options_of(const Options& o) {
  msf_metrics_options m;
  msf_metrics_options_default(&m);
  if (o.sla == "integrated") {
    m.sla = MSF_SLA_INTEGRATED_POWER;
  } else if (o.sla == "peak") {
    m.sla = MSF_SLA_PEAK_SUM;
  } else {
    throw UsageError("--sla must be integrated or peak");
  }
  return m;
}

msf_error_type parse_type(const std::string& s) {
  if (s == "stuck" || s == "S") return MSF_TYPE_STUCK;
  if (s == "out" || s == "O") return MSF_TYPE_OUT_OF_STATE;
  if (s == "det" || s == "D") return MSF_TYPE_DETERMINISTIC;
  if (s == "biased" || s == "B") return MSF_TYPE_BIASED;
  throw UsageError("unknown error type: " + s);
}

msf_distribution parse_dist(const std::string& s) {
  if (s == "ind" || s == "I") return MSF_DIST_INDEPENDENT;
  if (s == "clu" || s == "C") return MSF_DIST_CLUSTERED;
  if (s == "ali" || s == "A") return MSF_DIST_ALIGNED;
  if (s == "sta" || s == "S") return MSF_DIST_STATE_SPECIFIC;
  throw UsageError("unknown spatial distribution: " + s);
}

std::vector<int> parse_states(const std::string& s) {
  std::vector<int> out;
  for (const auto& t : split(s, s.find(':') != std::string::npos ? ':' : ',')) {
    out.push_back(static_cast<int>(to_int(t, "target state")));
  }
  return out;
}

// Scenario from the flags; nullopt when no fault injection was requested.
struct ScenarioArgs {
  msf_scenario scenario;
  std::vector<int> states;
  std::string acronym;
};

std::optional<ScenarioArgs> scenario_of(Options o) {
  if (!o.inject.empty()) {
    const auto parts = split(o.inject, ',');
    if (parts.size() < 3) throw UsageError("--inject expects type,dist,rate[,key=value...]");
    o.type = parts[0];
    o.dist = parts[1];
    o.rate = to_double(parts[2], "rate");
    for (std::size_t i = 3; i < parts.size(); ++i) {
      const auto eq = parts[i].find('=');
      if (eq == std::string::npos) throw UsageError("--inject: expected key=value, got '" + parts[i] + "'");
      const std::string k = parts[i].substr(0, eq), v = parts[i].substr(eq + 1);
      if (k == "seed") {
        o.seed = v;
      } else if (k == "delta") {
        o.delta = static_cast<int>(to_int(v, "delta"));
      } else if (k == "det-gamma") {
        o.det_gamma = to_double(v, "det-gamma");
      } else if (k == "det-phi") {
        o.det_phi = to_double(v, "det-phi");
      } else if (k == "cluster-seed") {
        o.cluster_seed = v;
      } else if (k == "target-states") {
        o.target_states = v;
      } else if (k == "amplitude" && v == "uniform") {
        o.uniform_amplitude = true;
      } else {
        throw UsageError("--inject: unknown key '" + k + "'");
      }
    }
  }
  if (o.type.empty() && o.dist.empty()) return std::nullopt;
  if (o.type.empty() || o.dist.empty()) throw UsageError("fault injection needs both --type and --dist");
  if (o.seed.empty()) throw UsageError("--seed is required when injecting faults");
  if (!(o.rate >= 0.0 && o.rate <= 1.0)) throw UsageError("--rate must lie in [0, 1]");

  ScenarioArgs a;
  msf_scenario_default(&a.scenario);
  auto& s = a.scenario;
  s.type = parse_type(o.type);
  s.distribution = parse_dist(o.dist);
  s.rate = o.rate;
  s.seed = to_seed(o.seed);
  s.biased_delta = o.delta;
  s.out_uniform_amplitude = o.uniform_amplitude;
  if (o.det_gamma || o.det_phi) {
    s.det_has_value = 1;
    s.det_gamma = o.det_gamma.value_or(0.9);
    s.det_phi_deg = o.det_phi.value_or(45.0);
  }
  if (!o.cluster_seed.empty()) {
    const auto rc = split(o.cluster_seed, o.cluster_seed.find(':') != std::string::npos ? ':' : ',');
    if (rc.size() != 2) throw UsageError("--cluster-seed expects r,c");
    s.cluster_has_seed = 1;
    s.cluster_row = static_cast<int>(to_int(rc[0], "cluster row"));
    s.cluster_col = static_cast<int>(to_int(rc[1], "cluster column"));
  }
  if (!o.target_states.empty()) a.states = parse_states(o.target_states);
  static const char kDist[] = {'I', 'C', 'A', 'S'};
  static const char kType[] = {'S', 'O', 'D', 'B'};
  a.acronym = {kDist[s.distribution], kType[s.type]};
  return a;
}

Reflection inject(const msf_coding* coding, ScenarioArgs& a, std::size_t* n_faulty = nullptr) {
  a.scenario.target_states = a.states.empty() ? nullptr : a.states.data();
  a.scenario.n_target_states = a.states.size();
  msf_reflection* r = nullptr;
  check(msf_inject(coding, &a.scenario, &r, n_faulty));
  return Reflection(r);
}

std::vector<double> parse_rates(const std::string& s) {
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    const auto p = split(s, ':');
    if (p.size() != 3) throw UsageError("--rates expects start:stop:step or a comma list");
    const double a = to_double(p[0], "rate start"), b = to_double(p[1], "rate stop"), h = to_double(p[2], "rate step");
    if (!(h > 0.0) || b < a) throw UsageError("--rates: empty range");
    const int n = static_cast<int>((b - a) / h + 1e-9);
    for (int k = 0; k <= n; ++k) out.push_back(std::round((a + k * h) * 1e12) / 1e12);
  } else {
    for (const auto& t : split(s, ',')) out.push_back(to_double(t, "rate"));
  }
  return out;
}

std::vector<std::string> parse_scenarios(const std::string& s) {
  if (s == "all") return {"CS", "CO", "CD", "CB", "IS", "IO", "ID", "IB"};
  auto out = split(s, ',');
  for (const auto& a : out) {
    msf_scenario tmp;
    msf_scenario_default(&tmp);
    if (msf_scenario_from_acronym(a.c_str(), &tmp) != MSF_OK) throw UsageError("unknown scenario acronym: " + a);
  }
  return out;
}

std::string flags_text(unsigned flags) {
  char buf[64];
  msf_flags_string(flags, buf, sizeof buf);
  return buf;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void print_metrics_csv(std::ostream& out, const std::string& label, double rate, const msf_metrics& m) {
  out << "scenario,rate,trial,td_deg,d_target_db,d_actual_db,sll_db,sll_max_db,sla_db,hpbw_deg,n_lobes,flags\n";
  out << label << ',' << num(rate) << ",0," << num(m.td_deg) << ',' << num(m.d_target_db) << ','
      << num(m.d_actual_db) << ',' << num(m.sll_db) << ',' << num(m.sll_max_db) << ',' << num(m.sla_db) << ','
      << num(m.hpbw_deg) << ',' << m.n_lobes << ',' << flags_text(m.flags) << '\n';
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw RuntimeError("cannot write " + path);
  return file;
}

// ---- subcommands ----

int cmd_code(const Options& o) {
  const Coding c = load_or_generate(o);
  check(msf_coding_save(c.get(), o.output.c_str()));
  return 0;
}

int cmd_inject(const Options& o) {
  auto a = scenario_of(o);
  if (!a) throw UsageError("inject needs a scenario (--inject or --type/--dist)");
  const Coding c = load_or_generate(o);
  std::size_t n = 0;
  const Reflection r = inject(c.get(), *a, &n);
  check(msf_reflection_save(r.get(), o.output.c_str()));
  std::cerr << a->acronym << ": " << n << " faulty cells\n";
  return 0;
}

int cmd_pattern(const Options& o) {
  auto a = scenario_of(o);
  const msf_angular ang = angular_of(o);
  const msf_metrics_options mo = metric_options_of(o);
  const Coding c = load_or_generate(o);
  double reference = 0.0;
  check(msf_golden(c.get(), &ang, &mo, nullptr, &reference));
  msf_reflection* rp = nullptr;
  Reflection r;
  if (a) {
    r = inject(c.get(), *a);
  } else {
    check(msf_reflection_from_coding(c.get(), &rp));
    r.reset(rp);
  }
  msf_pattern* pp = nullptr;
  check(msf_pattern_evaluate(r.get(), &ang, &reference, &pp));
  const Pattern p(pp);
  check(msf_pattern_save_csv(p.get(), o.output.c_str(), o.floor_db));
  if (o.with_metrics) {
    msf_target t;
    check(msf_coding_target(c.get(), &t));
    msf_metrics m;
    check(msf_metrics_compute(r.get(), &ang, &t, reference, &mo, &m));
    print_metrics_csv(std::cerr, a ? a->acronym : "golden", a ? a->scenario.rate : 0.0, m);
  }
  return 0;
}

int cmd_metrics(const Options& o) {
  const msf_metrics_options mo = metric_options_of(o);
  msf_metrics m;
  std::string label = "golden";
  double rate = 0.0;
  if (!o.pattern_in.empty()) {
    msf_pattern* pp = nullptr;
    check(msf_pattern_load_csv(o.pattern_in.c_str(), &pp));
    const Pattern p(pp);
    double ref = 0.0;
    check(msf_pattern_reference(p.get(), &ref));
    const msf_target t = target_of(o);
    check(msf_metrics_from_pattern(p.get(), &t, ref, &mo, &m));
    label = "pattern";
  } else {
    auto a = scenario_of(o);
    const msf_angular ang = angular_of(o);
    Reflection r;
    msf_target t = target_of(o);
    double reference = 0.0;
    if (!o.reflection_in.empty()) {
      msf_reflection* rp = nullptr;
      check(msf_reflection_load(o.reflection_in.c_str(), &rp));
      r.reset(rp);
      if (!o.coding_in.empty()) {
        const Coding c = load_or_generate(o);
        check(msf_coding_target(c.get(), &t));
        check(msf_golden(c.get(), &ang, &mo, nullptr, &reference));
      } else {
        // No golden coding: normalize to the grid's own fault-free peak.
        msf_metrics self;
        check(msf_metrics_compute(r.get(), &ang, &t, 1.0, &mo, &self));
        reference = self.peak_magnitude;
      }
      label = "reflection";
    } else {
      const Coding c = load_or_generate(o);
      check(msf_coding_target(c.get(), &t));
      check(msf_golden(c.get(), &ang, &mo, nullptr, &reference));
      if (a) {
        r = inject(c.get(), *a);
        label = a->acronym;
        rate = a->scenario.rate;
      } else {
        msf_reflection* rp = nullptr;
        check(msf_reflection_from_coding(c.get(), &rp));
        r.reset(rp);
      }
    }
    check(msf_metrics_compute(r.get(), &ang, &t, reference, &mo, &m));
  }
  std::ofstream file;
  print_metrics_csv(open_output(o.output, file), label, rate, m);
  return 0;
}

int cmd_golden(const Options& o) {
  const msf_angular ang = angular_of(o);
  const msf_metrics_options mo = metric_options_of(o);
  const Coding c = load_or_generate(o);
  msf_metrics m;
  double reference = 0.0;
  check(msf_golden(c.get(), &ang, &mo, &m, &reference));
  std::ofstream file;
  std::ostream& out = open_output(o.output, file);
  if (o.csv) {
    print_metrics_csv(out, "golden", 0.0, m);
    return 0;
  }
  msf_geometry g;
  msf_target t;
  check(msf_coding_geometry(c.get(), &g));
  check(msf_coding_target(c.get(), &t));
  char line[160];
  auto row = [&](const char* name, double v, const char* unit) {
    std::snprintf(line, sizeof line, "%-16s %10.4f %s\n", name, v, unit);
    out << line;
  };
  std::snprintf(line, sizeof line, "golden reference  %dx%d cells, D=%.3g mm, f=%.6g GHz, target (%.2f, %.2f) deg\n",
                g.n_rows, g.n_cols, g.cell_size_m * 1e3, g.frequency_hz / 1e9, t.theta_deg, t.phi_deg);
  out << line;
  row("theta_a", m.theta_a_deg, "deg");
  row("phi_a", m.phi_a_deg, "deg");
  row("TD", m.td_deg, "deg");
  row("D(theta_r,phi_r)", m.d_target_db, "dB");
  row("D(theta_a,phi_a)", m.d_actual_db, "dB");
  row("SLL", m.sll_db, "dB");
  row("SLL max", m.sll_max_db, "dB");
  row("SLA", m.sla_db, "dB");
  row("HPBW", m.hpbw_deg, "deg");
  std::snprintf(line, sizeof line, "%-16s %10d\n%-16s %10s\n", "lobes", m.n_lobes, "flags",
                m.flags ? flags_text(m.flags).c_str() : "-");
  out << line;
  return 0;
}

void report_progress(std::size_t done, std::size_t total, void*) {
  if (done == total || done % 100 == 0) {
    std::fprintf(stderr, "\r%zu/%zu trials", done, total);
    if (done == total) std::fputc('\n', stderr);
  }
}

int cmd_sweep(const Options& o) {
  if (o.seed.empty()) throw UsageError("--seed is required for sweeps");
  if (o.trials < 1) throw UsageError("--trials must be at least 1");
  if (o.jobs < 1) throw UsageError("--jobs must be at least 1");
  if (o.output == "-" && o.manifest.empty()) throw UsageError("sweep needs --output or --manifest");
  const auto scenarios = parse_scenarios(o.scenarios);
  const auto rates = parse_rates(o.rates);
  const msf_angular ang = angular_of(o);
  const msf_metrics_options mo = metric_options_of(o);
  const Coding c = load_or_generate(o);

  std::vector<const char*> names;
  for (const auto& s : scenarios) names.push_back(s.c_str());
  const msf_sweep_plan plan{names.data(), names.size(), rates.data(), rates.size(), o.trials, to_seed(o.seed),
                            o.jobs,       o.trials_out.empty() ? 0 : 1};
  msf_sweep* sp = nullptr;
  const msf_status st = msf_sweep_run(c.get(), &plan, &ang, &mo, o.progress ? report_progress : nullptr, nullptr, &sp);
  if (st == MSF_ERR_OUT_OF_RANGE || st == MSF_ERR_INVALID_ARGUMENT) throw UsageError(msf_last_error());
  check(st);
  const Sweep s(sp);
  check(msf_sweep_write_csv(s.get(), o.output.c_str()));
  if (!o.trials_out.empty()) check(msf_sweep_write_trials_csv(s.get(), o.trials_out.c_str()));
  const std::string manifest = !o.manifest.empty() ? o.manifest : (o.output == "-" ? "" : o.output + ".manifest.json");
  if (!manifest.empty()) check(msf_sweep_write_manifest(s.get(), manifest.c_str()));
  const int errors = msf_sweep_errors(s.get());
  if (errors > 0) {
    std::cerr << "msfault: " << errors << " trial(s) failed\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coding metasurface fault simulator"};
  app.set_version_flag("--version", std::string("msfault ") + msf_version());
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config, "JSON config; command-line flags take precedence")->check(CLI::ExistingFile);

  auto* code = app.add_subcommand("code", "Generate a coding document");
  add_surface(code, o);
  code->add_option("-o,--output", o.output, "Output path, - for stdout");

  auto* inject_cmd = app.add_subcommand("inject", "Apply a fault scenario and write the reflection grid");
  add_surface(inject_cmd, o);
  add_scenario(inject_cmd, o);
  inject_cmd->add_option("-o,--output", o.output, "Output path, - for stdout");

  auto* pattern = app.add_subcommand("pattern", "Evaluate the far-field pattern to CSV");
  add_surface(pattern, o);
  add_angular(pattern, o);
  add_scenario(pattern, o);
  add_metric_options(pattern, o);
  pattern->add_option("-o,--output", o.output, "Output CSV, - for stdout");
  pattern->add_option("--floor-db", o.floor_db, "Lower clamp of the dB column");
  pattern->add_flag("--metrics", o.with_metrics, "Also print the metrics row to stderr");

  auto* metrics = app.add_subcommand("metrics", "Compute the metrics row of one pattern");
  add_surface(metrics, o);
  add_angular(metrics, o);
  add_scenario(metrics, o);
  add_metric_options(metrics, o);
  metrics->add_option("--reflection", o.reflection_in, "Reflection grid document");
  metrics->add_option("--pattern", o.pattern_in, "Pattern CSV (sample-based metrics)");
  metrics->add_option("-o,--output", o.output, "Output CSV, - for stdout");

  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over scenarios and rates");
  add_surface(sweep, o);
  add_angular(sweep, o);
  add_metric_options(sweep, o);
  sweep->add_option("--scenarios", o.scenarios, "Comma-separated acronyms or 'all'");
  sweep->add_option("--rates", o.rates, "start:stop:step or comma list");
  sweep->add_option("--trials", o.trials, "Trials per scenario and rate");
  sweep->add_option("--seed", o.seed, "Root seed (required)");
  sweep->add_option("--jobs", o.jobs, "Worker threads");
  sweep->add_option("-o,--output", o.output, "Summary CSV");
  sweep->add_option("--trials-out", o.trials_out, "Per-trial metrics CSV");
  sweep->add_option("--manifest", o.manifest, "Run manifest (default <output>.manifest.json)");
  sweep->add_flag("--progress", o.progress, "Report progress on stderr");

  auto* golden = app.add_subcommand("golden", "Print the golden-reference metrics table");
  add_surface(golden, o);
  add_angular(golden, o);
  add_metric_options(golden, o);
  golden->add_flag("--csv", o.csv, "Metrics CSV row instead of the table");
  golden->add_option("-o,--output", o.output, "Output path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    apply_config(o, Flags{sub});
    if (sub == code) return cmd_code(o);
    if (sub == inject_cmd) return cmd_inject(o);
    if (sub == pattern) return cmd_pattern(o);
    if (sub == metrics) return cmd_metrics(o);
    if (sub == sweep) return cmd_sweep(o);
    if (sub == golden) return cmd_golden(o);
  } catch (const UsageError& e) {
    std::cerr << "msfault: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "msfault: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
