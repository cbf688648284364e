// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <msfault/msfault.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

extern "C" int msf_header_compiles_as_c(void);

namespace {

std::filesystem::path temp_file(const char* name) { return std::filesystem::temp_directory_path() / name; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

msf_coding* golden_coding() {
  msf_geometry g;
  msf_geometry_default(&g);
  const msf_target t{45, 45};
  msf_coding* c = nullptr;
  REQUIRE(msf_coding_generate(&g, &t, nullptr, &c) == MSF_OK);
  return c;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(msf_version()) > 0);
  CHECK(std::string(msf_status_name(MSF_OK)) == "ok");
  CHECK(std::string(msf_status_name(MSF_ERR_PARSE)) == "parse error");
  CHECK(msf_header_compiles_as_c() == 15);
}

TEST_CASE("default palette") {
  msf_palette* p = nullptr;
  REQUIRE(msf_palette_default(&p) == MSF_OK);
  CHECK(msf_palette_size(p) == 4);
  double gamma = 0, phi = 0;
  REQUIRE(msf_palette_state(p, 2, &gamma, &phi) == MSF_OK);
  CHECK(gamma == 0.9);
  CHECK(phi == 225.0);
  size_t idx = 99;
  REQUIRE(msf_palette_nearest(p, 53.0, &idx) == MSF_OK);
  CHECK(idx == 0);
  REQUIRE(msf_palette_nearest(p, 188.0, &idx) == MSF_OK);
  CHECK(idx == 2);
  CHECK(msf_palette_state(p, 4, &gamma, &phi) == MSF_ERR_OUT_OF_RANGE);
  CHECK(std::string(msf_last_error()).find("out of range") != std::string::npos);
  msf_palette_free(p);
}

TEST_CASE("palette creation reports bad input") {
  const double gamma[] = {1.2, 0.9};
  const double phi[] = {0, 180};
  msf_palette* p = nullptr;
  CHECK(msf_palette_create(gamma, phi, nullptr, 2, &p) == MSF_ERR_OUT_OF_RANGE);
  CHECK(p == nullptr);
  CHECK(std::string(msf_last_error()).find("amplitude out of range") != std::string::npos);
  const double ok_gamma[] = {0.9, 0.9};
  const char* labels[] = {"off", "on"};
  REQUIRE(msf_palette_create(ok_gamma, phi, labels, 2, &p) == MSF_OK);
  CHECK(msf_palette_size(p) == 2);
  const auto path = temp_file("msf_capi_palette.json");
  REQUIRE(msf_palette_save(p, path.string().c_str()) == MSF_OK);
  msf_palette* q = nullptr;
  REQUIRE(msf_palette_load(path.string().c_str(), &q) == MSF_OK);
  CHECK(msf_palette_size(q) == 2);
  msf_palette_free(q);
  msf_palette_free(p);
  std::filesystem::remove(path);
}

TEST_CASE("null pointers are reported") {
  CHECK(msf_palette_default(nullptr) == MSF_ERR_NULL_POINTER);
  CHECK(msf_coding_generate(nullptr, nullptr, nullptr, nullptr) == MSF_ERR_NULL_POINTER);
  CHECK(std::strlen(msf_last_error()) > 0);
  CHECK(msf_palette_size(nullptr) == 0);
  msf_palette_free(nullptr);
  msf_coding_free(nullptr);
  msf_reflection_free(nullptr);
  msf_pattern_free(nullptr);
  msf_sweep_free(nullptr);
}

TEST_CASE("coding generation and round trip") {
  msf_coding* c = golden_coding();
  msf_geometry g;
  REQUIRE(msf_coding_geometry(c, &g) == MSF_OK);
  CHECK(g.n_rows == 15);
  CHECK(g.frequency_hz == doctest::Approx(25e9));
  msf_target t;
  REQUIRE(msf_coding_target(c, &t) == MSF_OK);
  CHECK(t.theta_deg == 45.0);
  int s = -1;
  REQUIRE(msf_coding_cell(c, 0, 0, &s) == MSF_OK);
  CHECK(s >= 0);
  CHECK(msf_coding_cell(c, 15, 0, &s) == MSF_ERR_OUT_OF_RANGE);

  const auto path = temp_file("msf_capi_coding.json");
  REQUIRE(msf_coding_save(c, path.string().c_str()) == MSF_OK);
  msf_coding* d = nullptr;
  REQUIRE(msf_coding_load(path.string().c_str(), &d) == MSF_OK);
  for (int r = 0; r < 15; ++r) {
    for (int k = 0; k < 15; ++k) {
      int a = 0, b = 0;
      msf_coding_cell(c, r, k, &a);
      msf_coding_cell(d, r, k, &b);
      CHECK(a == b);
    }
  }
  msf_coding_free(d);
  msf_coding_free(c);
  std::filesystem::remove(path);
  CHECK(msf_coding_load(path.string().c_str(), &d) == MSF_ERR_IO);
}

TEST_CASE("invalid targets") {
  msf_geometry g;
  msf_geometry_default(&g);
  const msf_target t{95, 0};
  msf_coding* c = nullptr;
  CHECK(msf_coding_generate(&g, &t, nullptr, &c) == MSF_ERR_OUT_OF_RANGE);
  CHECK(c == nullptr);
}

TEST_CASE("malformed documents are parse errors") {
  const auto path = temp_file("msf_capi_bad.json");
  {
    std::ofstream(path) << "{ not json";
  }
  msf_coding* c = nullptr;
  CHECK(msf_coding_load(path.string().c_str(), &c) == MSF_ERR_PARSE);
  std::filesystem::remove(path);
}

TEST_CASE("fault injection") {
  msf_coding* c = golden_coding();
  msf_scenario sc;
  msf_scenario_default(&sc);
  REQUIRE(msf_scenario_from_acronym("CD", &sc) == MSF_OK);
  CHECK(sc.type == MSF_TYPE_DETERMINISTIC);
  CHECK(sc.distribution == MSF_DIST_CLUSTERED);
  sc.rate = 0.3;
  sc.seed = 7;
  msf_reflection* r = nullptr;
  size_t n = 0;
  REQUIRE(msf_inject(c, &sc, &r, &n) == MSF_OK);
  CHECK(n == 68);
  size_t faulty = 0;
  for (int i = 0; i < 15; ++i) {
    for (int k = 0; k < 15; ++k) {
      double gamma = 0, phi = 0;
      int f = 0;
      REQUIRE(msf_reflection_cell(r, i, k, &gamma, &phi, &f) == MSF_OK);
      if (f) {
        ++faulty;
        CHECK(phi == 45.0);
      }
    }
  }
  CHECK(faulty == n);

  const auto path = temp_file("msf_capi_reflection.json");
  REQUIRE(msf_reflection_save(r, path.string().c_str()) == MSF_OK);
  msf_reflection* back = nullptr;
  REQUIRE(msf_reflection_load(path.string().c_str(), &back) == MSF_OK);
  double g1, p1, g2, p2;
  msf_reflection_cell(r, 7, 7, &g1, &p1, nullptr);
  msf_reflection_cell(back, 7, 7, &g2, &p2, nullptr);
  CHECK(g1 == g2);
  CHECK(p1 == p2);
  msf_reflection_free(back);
  msf_reflection_free(r);
  std::filesystem::remove(path);

  sc.rate = 1.5;
  CHECK(msf_inject(c, &sc, &r, nullptr) == MSF_ERR_OUT_OF_RANGE);
  CHECK(msf_scenario_from_acronym("QQ", &sc) == MSF_ERR_PARSE);
  msf_coding_free(c);
}

TEST_CASE("patterns and metrics") {
  msf_coding* c = golden_coding();
  msf_reflection* r = nullptr;
  REQUIRE(msf_reflection_from_coding(c, &r) == MSF_OK);
  msf_pattern* p = nullptr;
  REQUIRE(msf_pattern_evaluate(r, nullptr, nullptr, &p) == MSF_OK);
  msf_angular a;
  REQUIRE(msf_pattern_angular(p, &a) == MSF_OK);
  CHECK(a.n_theta == 91);
  CHECK(a.n_phi == 360);
  double th = 0, ph = 0, mag = 0, ref = 0;
  REQUIRE(msf_pattern_argmax(p, &th, &ph, &mag) == MSF_OK);
  REQUIRE(msf_pattern_reference(p, &ref) == MSF_OK);
  CHECK(mag == ref);
  CHECK(ph == 45.0);
  double v = 0;
  REQUIRE(msf_pattern_value(p, 90, 10, &v) == MSF_OK);
  CHECK(v == 0.0);
  CHECK(msf_pattern_value(p, 91, 0, &v) == MSF_ERR_OUT_OF_RANGE);

  msf_metrics golden;
  double reference = 0;
  REQUIRE(msf_golden(c, nullptr, nullptr, &golden, &reference) == MSF_OK);
  CHECK(golden.d_actual_db == 0.0);
  CHECK(golden.peak_magnitude == reference);
  CHECK(golden.n_lobes >= 2);

  const msf_target t{45, 45};
  msf_metrics m;
  REQUIRE(msf_metrics_compute(r, nullptr, &t, reference, nullptr, &m) == MSF_OK);
  CHECK(m.td_deg == golden.td_deg);
  CHECK(m.sll_db == golden.sll_db);
  CHECK(msf_metrics_compute(r, nullptr, &t, 0.0, nullptr, &m) == MSF_ERR_INVALID_ARGUMENT);

  msf_metrics s;
  REQUIRE(msf_metrics_from_pattern(p, &t, ref, nullptr, &s) == MSF_OK);
  CHECK(s.d_actual_db == 0.0);
  CHECK(s.theta_a_deg == th);

  const auto path = temp_file("msf_capi_pattern.csv");
  REQUIRE(msf_pattern_save_csv(p, path.string().c_str(), -100.0) == MSF_OK);
  msf_pattern* q = nullptr;
  REQUIRE(msf_pattern_load_csv(path.string().c_str(), &q) == MSF_OK);
  double v1 = 0, v2 = 0;
  msf_pattern_value(p, 40, 45, &v1);
  msf_pattern_value(q, 40, 45, &v2);
  CHECK(v1 == v2);
  msf_pattern_free(q);
  std::filesystem::remove(path);

  msf_pattern_free(p);
  msf_reflection_free(r);
  msf_coding_free(c);
}

TEST_CASE("flag strings") {
  char buf[64];
  CHECK(msf_flags_string(MSF_FLAG_POLE | MSF_FLAG_SINGLE_LOBE, buf, sizeof buf) == 16);
  CHECK(std::string(buf) == "pole|single_lobe");
  char tiny[5];
  CHECK(msf_flags_string(MSF_FLAG_HPBW_CAPPED, tiny, sizeof tiny) == 11);
  CHECK(std::string(tiny) == "hpbw");
  CHECK(msf_flags_string(0, nullptr, 0) == 0);
}

namespace {
void count_progress(size_t, size_t, void* user) { ++*static_cast<size_t*>(user); }
}  // namespace

TEST_CASE("sweeps") {
  msf_coding* c = golden_coding();
  const char* scenarios[] = {"CD", "IB"};
  const double rates[] = {0.0, 0.2};
  msf_sweep_plan plan{scenarios, 2, rates, 2, 2, 42, 2, 1};
  msf_angular a;
  REQUIRE(msf_angular_hemisphere(3.0, &a) == MSF_OK);
  size_t calls = 0;
  msf_sweep* s = nullptr;
  REQUIRE(msf_sweep_run(c, &plan, &a, nullptr, count_progress, &calls, &s) == MSF_OK);
  CHECK(calls == 8);
  CHECK(msf_sweep_errors(s) == 0);
  CHECK(msf_sweep_wall_seconds(s) > 0.0);
  CHECK(msf_sweep_trial_count(s) == 8);
  CHECK(msf_sweep_summary_count(s) == 2 * 2 * 11);
  msf_summary_row row;
  REQUIRE(msf_sweep_lookup(s, "CD", 0.0, "d_target", &row) == MSF_OK);
  CHECK(row.std == 0.0);
  CHECK(row.n == 2);
  CHECK(std::string(row.metric) == "d_target");
  CHECK(msf_sweep_lookup(s, "CD", 0.3, "d_target", &row) == MSF_ERR_OUT_OF_RANGE);
  CHECK(msf_sweep_lookup(s, "CD", 0.0, "gain", &row) == MSF_ERR_PARSE);
  msf_trial_row t;
  REQUIRE(msf_sweep_trial(s, 3, &t) == MSF_OK);
  CHECK(std::string(t.scenario) == "CD");
  CHECK(t.rate == 0.2);
  CHECK(t.trial == 1);
  CHECK(msf_sweep_trial(s, 8, &t) == MSF_ERR_OUT_OF_RANGE);
  msf_metrics g;
  REQUIRE(msf_sweep_golden(s, &g) == MSF_OK);
  CHECK(g.d_actual_db == 0.0);

  const auto csv = temp_file("msf_capi_sweep.csv");
  const auto trials = temp_file("msf_capi_trials.csv");
  const auto manifest = temp_file("msf_capi_manifest.json");
  REQUIRE(msf_sweep_write_csv(s, csv.string().c_str()) == MSF_OK);
  REQUIRE(msf_sweep_write_trials_csv(s, trials.string().c_str()) == MSF_OK);
  REQUIRE(msf_sweep_write_manifest(s, manifest.string().c_str()) == MSF_OK);
  CHECK(slurp(csv).rfind("scenario,rate,metric,mean,std,min,max,n,flagged\n", 0) == 0);
  CHECK(slurp(manifest).find("\"root_seed\": 42") != std::string::npos);

  // Same plan with one worker gives identical output.
  plan.jobs = 1;
  msf_sweep* s1 = nullptr;
  REQUIRE(msf_sweep_run(c, &plan, &a, nullptr, nullptr, nullptr, &s1) == MSF_OK);
  const auto csv1 = temp_file("msf_capi_sweep1.csv");
  REQUIRE(msf_sweep_write_csv(s1, csv1.string().c_str()) == MSF_OK);
  CHECK(slurp(csv) == slurp(csv1));
  msf_sweep_free(s1);

  for (const auto& p : {csv, trials, manifest, csv1}) std::filesystem::remove(p);
  msf_sweep_free(s);

  plan.trials = 0;
  CHECK(msf_sweep_run(c, &plan, &a, nullptr, nullptr, nullptr, &s) == MSF_ERR_INVALID_ARGUMENT);
  msf_coding_free(c);
}

TEST_CASE("default sweep plan") {
  msf_sweep_plan plan;
  msf_sweep_plan_default(&plan);
  CHECK(plan.n_scenarios == 8);
  CHECK(plan.n_rates == 51);
  CHECK(plan.trials == 100);
  CHECK(std::string(plan.scenarios[2]) == "CD");
  CHECK(plan.rates[50] == 0.5);
}
