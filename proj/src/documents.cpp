// SPDX-License-Identifier: Apache-2.0

#include "documents.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "error.hpp"

namespace msfault {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

template <class F>
auto parsing(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("malformed document: ") + e.what());
  }
}

void expect_format(const json& doc, const char* format) {
  if (!doc.is_object() || doc.value("format", "") != format)
    fail(ErrorCode::Parse, std::string("expected a '") + format + "' document");
  if (doc.value("version", 0) != kFormatVersion) fail(ErrorCode::Parse, "unsupported document version");
}

json geometry_to_json(const MetasurfaceGeometry& g) {
  return {{"n_rows", g.n_rows},
          {"n_cols", g.n_cols},
          {"cell_size_m", g.cell_size_m},
          {"wavelength_m", g.wavelength_m},
          {"frequency_hz", kSpeedOfLight / g.wavelength_m}};
}

MetasurfaceGeometry geometry_from_json(const json& j) {
  MetasurfaceGeometry g;
  g.n_rows = j.at("n_rows").get<int>();
  g.n_cols = j.at("n_cols").get<int>();
  g.cell_size_m = j.at("cell_size_m").get<double>();
  if (j.contains("wavelength_m")) {
    g.wavelength_m = j.at("wavelength_m").get<double>();
  } else {
    g.wavelength_m = kSpeedOfLight / j.at("frequency_hz").get<double>();
  }
  g.validate();
  return g;
}

template <class T, class F>
json grid_to_json(const Grid<T>& grid, F&& value) {
  json rows = json::array();
  for (int r = 0; r < grid.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < grid.cols(); ++c) row.push_back(value(grid(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class T>
Grid<T> grid_from_json(const json& rows, int n_rows, int n_cols, const char* what) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != n_rows)
    fail(ErrorCode::Parse, std::string(what) + ": row count does not match geometry");
  Grid<T> out(n_rows, n_cols);
  for (int r = 0; r < n_rows; ++r) {
    const auto& row = rows[r];
    if (!row.is_array() || static_cast<int>(row.size()) != n_cols)
      fail(ErrorCode::Parse, std::string(what) + ": column count does not match geometry");
    for (int c = 0; c < n_cols; ++c) out(r, c) = row[c].get<T>();
  }
  return out;
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::nan("");
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) fail(ErrorCode::Parse, "bad number in CSV: " + std::string(s));
  return v;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, p);
}

json palette_to_json(const StatePalette& palette) {
  json out = json::array();
  for (std::size_t i = 0; i < palette.size(); ++i) {
    out.push_back({{"label", palette.label(i)}, {"gamma", palette.state(i).gamma}, {"phi_deg", palette.state(i).phi_deg}});
  }
  return out;
}

StatePalette palette_from_json(const json& doc) {
  return parsing([&] {
    const json& list = doc.is_object() ? doc.at("states") : doc;
    if (!list.is_array()) fail(ErrorCode::Parse, "palette must be a list of states");
    std::vector<UnitCellResponse> states;
    std::vector<std::string> labels;
    bool any_label = false;
    for (const auto& s : list) {
      states.push_back({s.at("gamma").get<double>(), s.at("phi_deg").get<double>()});
      if (s.contains("label")) any_label = true;
      labels.push_back(s.value("label", "s" + std::to_string(labels.size())));
    }
    return StatePalette(std::move(states), any_label ? std::move(labels) : std::vector<std::string>{});
  });
}

json coding_to_json(const CodingGrid& coding) {
  return {{"format", "msfault-coding"},
          {"version", kFormatVersion},
          {"geometry", geometry_to_json(coding.geometry)},
          {"target", {{"theta_deg", coding.target.theta_deg}, {"phi_deg", coding.target.phi_deg}}},
          {"palette", palette_to_json(coding.palette)},
          {"cells", grid_to_json(coding.cells, [](std::uint8_t v) { return static_cast<int>(v); })}};
}

CodingGrid coding_from_json(const json& doc) {
  return parsing([&] {
    expect_format(doc, "msfault-coding");
    CodingGrid c{geometry_from_json(doc.at("geometry")),
                 {doc.at("target").at("theta_deg").get<double>(), doc.at("target").at("phi_deg").get<double>()},
                 palette_from_json(doc.at("palette")),
                 {}};
    c.target.validate();
    const auto raw = grid_from_json<int>(doc.at("cells"), c.geometry.n_rows, c.geometry.n_cols, "cells");
    c.cells = Grid<std::uint8_t>(raw.rows(), raw.cols());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const int v = raw.data()[i];
      if (v < 0 || v >= static_cast<int>(c.palette.size())) fail(ErrorCode::Parse, "cell index outside palette");
      c.cells.data()[i] = static_cast<std::uint8_t>(v);
    }
    c.validate();
    return c;
  });
}

json reflection_to_json(const ReflectionGrid& grid, const Grid<std::uint8_t>* mask) {
  json doc = {{"format", "msfault-reflection"},
              {"version", kFormatVersion},
              {"geometry", geometry_to_json(grid.geometry)},
              {"gamma", grid_to_json(grid.cells, [](const UnitCellResponse& r) { return r.gamma; })},
              {"phi_deg", grid_to_json(grid.cells, [](const UnitCellResponse& r) { return r.phi_deg; })}};
  if (mask) doc["mask"] = grid_to_json(*mask, [](std::uint8_t v) { return static_cast<int>(v); });
  return doc;
}

ReflectionGrid reflection_from_json(const json& doc) {
  return parsing([&] {
    expect_format(doc, "msfault-reflection");
    ReflectionGrid g{geometry_from_json(doc.at("geometry")), {}};
    const int nr = g.geometry.n_rows, nc = g.geometry.n_cols;
    const auto gamma = grid_from_json<double>(doc.at("gamma"), nr, nc, "gamma");
    const auto phi = grid_from_json<double>(doc.at("phi_deg"), nr, nc, "phi_deg");
    g.cells = Grid<UnitCellResponse>(nr, nc);
    for (std::size_t i = 0; i < gamma.size(); ++i) g.cells.data()[i] = make_response(gamma.data()[i], phi.data()[i]);
    g.validate();
    return g;
  });
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) fail(ErrorCode::Io, "write failed: " + path.string());
}

void write_pattern_csv(std::ostream& out, const FarFieldPattern& pattern, double floor_db) {
  const auto& g = pattern.grid;
  out << "# reference_peak=" << format_number(pattern.reference_peak) << '\n';
  out << "theta_deg,phi_deg,magnitude,db\n";
  for (int i = 0; i < g.n_theta; ++i) {
    for (int j = 0; j < g.n_phi; ++j) {
      const double m = pattern.at(i, j);
      out << format_number(g.theta(i)) << ',' << format_number(g.phi(j)) << ',' << format_number(m) << ','
          << format_number(to_db(m, pattern.reference_peak, floor_db)) << '\n';
    }
  }
}

FarFieldPattern read_pattern_csv(std::istream& in) {
  FarFieldPattern p;
  std::string line;
  bool header = false;
  std::vector<double> thetas, phis;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find("reference_peak=");
      if (eq != std::string::npos) p.reference_peak = parse_double(line.substr(eq + 15));
      continue;
    }
    if (!header) {
      if (line != "theta_deg,phi_deg,magnitude,db") fail(ErrorCode::Parse, "unexpected pattern CSV header");
      header = true;
      continue;
    }
    std::istringstream row(line);
    std::string f[4];
    for (auto& s : f) {
      if (!std::getline(row, s, ',')) fail(ErrorCode::Parse, "short pattern CSV row");
    }
    thetas.push_back(parse_double(f[0]));
    phis.push_back(parse_double(f[1]));
    p.magnitude.push_back(parse_double(f[2]));
  }
  if (p.magnitude.empty()) fail(ErrorCode::Parse, "pattern CSV has no rows");
  const std::set<double> ut(thetas.begin(), thetas.end()), up(phis.begin(), phis.end());
  auto& g = p.grid;
  g.n_theta = static_cast<int>(ut.size());
  g.n_phi = static_cast<int>(up.size());
  if (p.magnitude.size() != g.size()) fail(ErrorCode::Parse, "pattern CSV is not a full angular grid");
  g.theta_start_deg = *ut.begin();
  g.phi_start_deg = *up.begin();
  g.theta_step_deg = g.n_theta > 1 ? (*ut.rbegin() - *ut.begin()) / (g.n_theta - 1) : 1.0;
  g.phi_step_deg = g.n_phi > 1 ? (*up.rbegin() - *up.begin()) / (g.n_phi - 1) : 1.0;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    const int i = static_cast<int>(k / g.n_phi), j = static_cast<int>(k % g.n_phi);
    if (std::abs(thetas[k] - g.theta(i)) > 1e-6 || std::abs(phis[k] - g.phi(j)) > 1e-6)
      fail(ErrorCode::Parse, "pattern CSV rows are not a uniform row-major grid");
  }
  g.validate();
  if (!(p.reference_peak > 0.0)) p.reference_peak = p.max();
  return p;
}

void write_metrics_row(std::ostream& out, const std::string& scenario, double rate, int trial,
                       const MetricsReport& r) {
  out << scenario << ',' << format_number(rate) << ',' << trial << ',' << format_number(r.td_deg) << ','
      << format_number(r.d_target_db) << ',' << format_number(r.d_actual_db) << ',' << format_number(r.sll_db) << ','
      << format_number(r.sll_max_db) << ',' << format_number(r.sla_db) << ',' << format_number(r.hpbw_deg) << ','
      << r.n_lobes << ',' << flags_to_string(r.flags) << '\n';
}

void write_trials_csv(std::ostream& out, const std::vector<TrialRow>& rows) {
  out << kMetricsCsvHeader << '\n';
  for (const auto& r : rows) write_metrics_row(out, r.scenario, r.rate, r.trial, r.metrics);
}

void write_sweep_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.scenario << ',' << format_number(r.rate) << ',' << metric_name(r.metric) << ',' << format_number(r.mean)
        << ',' << format_number(r.std) << ',' << format_number(r.min) << ',' << format_number(r.max) << ',' << r.n
        << ',' << r.flagged << '\n';
  }
}

json sweep_manifest(const SweepResult& result, const CodingGrid& coding, const std::string& version) {
  json scenarios = json::array();
  for (const auto& s : result.plan.scenarios) scenarios.push_back(s.acronym);
  const auto& g = result.golden;
  return {{"format", "msfault-manifest"},
          {"version", kFormatVersion},
          {"software_version", version},
          {"root_seed", result.plan.root_seed},
          {"plan",
           {{"scenarios", scenarios},
            {"rates", result.plan.rates},
            {"trials", result.plan.trials},
            {"jobs", result.plan.jobs}}},
          {"geometry", geometry_to_json(coding.geometry)},
          {"target", {{"theta_deg", coding.target.theta_deg}, {"phi_deg", coding.target.phi_deg}}},
          {"palette", palette_to_json(coding.palette)},
          {"golden",
           {{"td_deg", g.td_deg},
            {"d_target_db", g.d_target_db},
            {"d_actual_db", g.d_actual_db},
            {"sll_db", g.sll_db},
            {"sll_max_db", g.sll_max_db},
            {"sla_db", g.sla_db},
            {"hpbw_deg", g.hpbw_deg},
            {"theta_a_deg", g.actual.theta_deg},
            {"phi_a_deg", g.actual.phi_deg}}},
          {"errors", result.errors},
          {"wall_seconds", result.wall_seconds}};
}

}  // namespace msfault
