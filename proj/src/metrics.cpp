// SPDX-License-Identifier: Apache-2.0

#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "error.hpp"
#include "palette.hpp"

namespace msfault {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr int kBisectIterations = 50;

bool has_pole(const AngularGrid& g) { return g.theta_start_deg == 0.0; }

double wrap_phi(double phi) { return canonical_phase(phi); }

// Nearest survey sample of a direction.
std::size_t nearest_sample(const AngularGrid& g, Direction d) {
  int i = static_cast<int>(std::lround((d.theta_deg - g.theta_start_deg) / g.theta_step_deg));
  i = std::clamp(i, 0, g.n_theta - 1);
  double fj = (d.phi_deg - g.phi_start_deg) / g.phi_step_deg;
  int j;
  if (g.phi_wraps()) {
    j = static_cast<int>(std::lround(fj)) % g.n_phi;
    if (j < 0) j += g.n_phi;
  } else {
    j = std::clamp(static_cast<int>(std::lround(fj)), 0, g.n_phi - 1);
  }
  if (i == 0 && has_pole(g)) j = 0;
  return static_cast<std::size_t>(i) * g.n_phi + j;
}

// Sorts lobes by peak magnitude (ties: first seen) and rewrites the label map.
void sort_lobes(LobeMap& map) {
  std::vector<int> order(map.lobes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return map.lobes[a].peak_magnitude > map.lobes[b].peak_magnitude; });
  std::vector<int> new_id(order.size());
  std::vector<Lobe> sorted;
  sorted.reserve(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    new_id[order[k]] = static_cast<int>(k);
    sorted.push_back(std::move(map.lobes[order[k]]));
  }
  map.lobes = std::move(sorted);
  for (auto& l : map.label) {
    if (l >= 0) l = new_id[l];
  }
}

// Point at signed arc `s` from `peak` along its meridian; crossing the pole
// continues on the opposite meridian.
Direction along_meridian(Direction peak, double s) {
  double theta = peak.theta_deg + s;
  double phi = peak.phi_deg;
  if (theta < 0.0) {
    theta = -theta;
    phi += 180.0;
  }
  return {theta, wrap_phi(phi)};
}

struct Edge {
  double offset;
  bool reached;
};

// Marches from 0 in direction `sign` until f drops below `level`, then
// bisects. f(0) is assumed >= level.
Edge find_edge(const std::function<double(double)>& f, double level, double sign, double step, double max_extent) {
  double inside = 0.0;
  for (int k = 1; k * step <= max_extent + 1e-12; ++k) {
    const double s = sign * k * step;
    if (f(s) < level) {
      double lo = inside, hi = s;
      for (int it = 0; it < kBisectIterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) >= level ? lo : hi) = mid;
      }
      return {0.5 * (lo + hi), true};
    }
    inside = s;
  }
  return {sign * max_extent, false};
}

double safe_sample(const FieldSampler& sampler, Direction d) {
  if (d.theta_deg > 90.0) return 0.0;
  return sampler(d);
}

}  // namespace

double great_circle_deg(Direction a, Direction b) {
  const double t1 = a.theta_deg * kDegToRad, t2 = b.theta_deg * kDegToRad;
  const double dp = (a.phi_deg - b.phi_deg) * kDegToRad;
  const double c = std::cos(t1) * std::cos(t2) + std::sin(t1) * std::sin(t2) * std::cos(dp);
  return std::acos(std::clamp(c, -1.0, 1.0)) / kDegToRad;
}

double sample_solid_angle(const AngularGrid& g, int i) {
  const double half = 0.5 * g.theta_step_deg;
  const double lo = std::max(0.0, g.theta(i) - half) * kDegToRad;
  const double hi = std::min(90.0, g.theta(i) + half) * kDegToRad;
  return (std::cos(lo) - std::cos(hi)) * g.phi_step_deg * kDegToRad;
}

LobeMap segment(const FarFieldPattern& pattern, const LobeOptions& options) {
  const auto& g = pattern.grid;
  const std::size_t n = pattern.magnitude.size();
  if (n == 0 || n != g.size()) fail(ErrorCode::InvalidArgument, "pattern is empty or inconsistent with its grid");
  const double peak = pattern.max();
  if (!(peak > 0.0)) fail(ErrorCode::Runtime, "pattern entirely below floor");
  const double floor = peak * std::pow(10.0, options.floor_db / 20.0);
  const bool pole = has_pole(g);
  const bool wraps = g.phi_wraps();

  auto node_of = [&](int i, int j) -> std::size_t {
    if (i == 0 && pole) return 0;
    return static_cast<std::size_t>(i) * g.n_phi + j;
  };
  const auto& v = pattern.magnitude;

  std::vector<std::size_t> neighbours;
  auto collect = [&](std::size_t a) {
    neighbours.clear();
    const int i = static_cast<int>(a / g.n_phi), j = static_cast<int>(a % g.n_phi);
    if (i == 0 && pole) {
      if (g.n_theta > 1)
        for (int jj = 0; jj < g.n_phi; ++jj) neighbours.push_back(node_of(1, jj));
      return;
    }
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        const int ii = i + di;
        if (ii < 0 || ii >= g.n_theta) continue;
        int jj = j + dj;
        if (wraps) {
          jj = (jj + g.n_phi) % g.n_phi;
        } else if (jj < 0 || jj >= g.n_phi) {
          continue;
        }
        neighbours.push_back(node_of(ii, jj));
      }
    }
  };

  // Steepest-ascent pointer of every above-floor node.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> up(n, kNone);
  for (int i = 0; i < g.n_theta; ++i) {
    for (int j = 0; j < g.n_phi; ++j) {
      const std::size_t a = node_of(i, j);
      if (a != static_cast<std::size_t>(i) * g.n_phi + j) continue;  // merged pole sample
      if (v[a] < floor) continue;
      collect(a);
      std::size_t best = a;
      double best_v = v[a];
      for (auto b : neighbours) {
        if (v[b] > best_v || (v[b] == best_v && best != a && b < best)) {
          best = b;
          best_v = v[b];
        }
      }
      up[a] = best;
    }
  }

  // Follow pointers to the basin's maximum.
  std::vector<std::size_t> root(n, kNone);
  std::vector<std::size_t> path;
  for (std::size_t a = 0; a < n; ++a) {
    if (up[a] == kNone || root[a] != kNone) continue;
    path.clear();
    std::size_t x = a;
    while (root[x] == kNone && up[x] != x) {
      path.push_back(x);
      x = up[x];
    }
    const std::size_t r = root[x] != kNone ? root[x] : x;
    root[x] = r;
    for (auto p : path) root[p] = r;
  }

  LobeMap map;
  map.label.assign(n, -1);
  std::vector<int> lobe_of(n, -1);
  for (int i = 0; i < g.n_theta; ++i) {
    const double w = sample_solid_angle(g, i);
    for (int j = 0; j < g.n_phi; ++j) {
      const std::size_t a = static_cast<std::size_t>(i) * g.n_phi + j;
      const std::size_t node = node_of(i, j);
      if (up[node] == kNone) continue;
      const std::size_t r = root[node];
      if (lobe_of[r] < 0) {
        lobe_of[r] = static_cast<int>(map.lobes.size());
        Lobe l;
        const int ri = static_cast<int>(r / g.n_phi), rj = static_cast<int>(r % g.n_phi);
        l.peak = {g.theta(ri), g.phi(rj)};
        l.peak_magnitude = v[r];
        map.lobes.push_back(std::move(l));
      }
      auto& lobe = map.lobes[lobe_of[r]];
      lobe.members.push_back(a);
      lobe.power += v[a] * v[a] * w;
      map.label[a] = lobe_of[r];
    }
  }
  sort_lobes(map);
  return map;
}

std::vector<Lobe> segment_lobes(const FarFieldPattern& pattern, const LobeOptions& options) {
  return segment(pattern, options).lobes;
}

double target_deviation(Direction actual, Direction target) {
  const double dt = target.theta_deg - actual.theta_deg;
  double dp = std::fmod(target.phi_deg - actual.phi_deg, 360.0);
  if (dp > 180.0) dp -= 360.0;
  if (dp <= -180.0) dp += 360.0;
  return std::sqrt(dt * dt + dp * dp);
}

double target_deviation(const FarFieldPattern& pattern, const SteeringTarget& target) {
  const auto a = pattern.argmax();
  const int i = static_cast<int>(a / pattern.grid.n_phi), j = static_cast<int>(a % pattern.grid.n_phi);
  return target_deviation(Direction{pattern.grid.theta(i), pattern.grid.phi(j)},
                          Direction{target.theta_deg, target.phi_deg});
}

double interpolate(const FarFieldPattern& pattern, Direction d) {
  const auto& g = pattern.grid;
  if (!(d.theta_deg >= 0.0 && d.theta_deg <= 90.0)) fail(ErrorCode::OutOfRange, "theta outside [0, 90]");
  double ft = (d.theta_deg - g.theta_start_deg) / g.theta_step_deg;
  int i0 = std::clamp(static_cast<int>(std::floor(ft)), 0, std::max(0, g.n_theta - 2));
  const int i1 = std::min(i0 + 1, g.n_theta - 1);
  const double tt = std::clamp(ft - i0, 0.0, 1.0);

  const double phi = wrap_phi(d.phi_deg);
  double fp = (phi - g.phi_start_deg) / g.phi_step_deg;
  int j0, j1;
  double tp;
  if (g.phi_wraps()) {
    if (fp < 0.0) fp += g.n_phi;
    j0 = static_cast<int>(std::floor(fp)) % g.n_phi;
    j1 = (j0 + 1) % g.n_phi;
    tp = fp - std::floor(fp);
  } else {
    j0 = std::clamp(static_cast<int>(std::floor(fp)), 0, std::max(0, g.n_phi - 2));
    j1 = std::min(j0 + 1, g.n_phi - 1);
    tp = std::clamp(fp - j0, 0.0, 1.0);
  }
  const double a = pattern.at(i0, j0) * (1 - tp) + pattern.at(i0, j1) * tp;
  const double b = pattern.at(i1, j0) * (1 - tp) + pattern.at(i1, j1) * tp;
  return a * (1 - tt) + b * tt;
}

double directivity_at(const FarFieldPattern& pattern, Direction direction, double reference, double floor_db) {
  if (!(reference > 0.0)) fail(ErrorCode::InvalidArgument, "normalization reference must be positive");
  return to_db(interpolate(pattern, direction), reference, floor_db);
}

SideLobeLevels side_lobe_levels(std::span<const Lobe> lobes, double floor_db) {
  SideLobeLevels out;
  if (lobes.size() < 2) return out;
  const auto& main = lobes[0];
  std::size_t nearest = 1;
  double best = great_circle_deg(main.peak, lobes[1].peak);
  for (std::size_t k = 2; k < lobes.size(); ++k) {
    const double d = great_circle_deg(main.peak, lobes[k].peak);
    if (d < best) {
      best = d;
      nearest = k;
    }
  }
  out.single_lobe = false;
  out.nearest_db = to_db(lobes[nearest].peak_magnitude, main.peak_magnitude, floor_db);
  out.largest_db = to_db(lobes[1].peak_magnitude, main.peak_magnitude, floor_db);
  return out;
}

double sll(std::span<const Lobe> lobes, double floor_db) { return side_lobe_levels(lobes, floor_db).nearest_db; }

double sla(std::span<const Lobe> lobes, SlaConvention convention, double floor_db) {
  if (lobes.empty()) fail(ErrorCode::InvalidArgument, "sla needs at least one lobe");
  if (lobes.size() < 2) return floor_db;
  auto weight = [&](const Lobe& l) {
    return convention == SlaConvention::IntegratedPower ? l.power : l.peak_magnitude * l.peak_magnitude;
  };
  double side = 0.0;
  for (std::size_t k = 1; k < lobes.size(); ++k) side += weight(lobes[k]);
  const double main = weight(lobes[0]);
  if (!(side > 0.0) || !(main > 0.0)) return floor_db;
  return std::max(floor_db, 10.0 * std::log10(side / main));
}

BeamWidth hpbw(const FieldSampler& sampler, Direction peak, double peak_magnitude, const HpbwOptions& options) {
  if (!(peak_magnitude > 0.0)) fail(ErrorCode::InvalidArgument, "beam width needs a positive peak");
  const double level = peak_magnitude * std::pow(10.0, options.level_db / 20.0);
  const double step = options.march_step_deg;
  BeamWidth out;

  auto meridian_width = [&](Direction through) {
    auto f = [&](double s) { return safe_sample(sampler, along_meridian(through, s)); };
    const Edge hi = find_edge(f, level, +1.0, step, 180.0);
    const Edge lo = find_edge(f, level, -1.0, step, 180.0);
    out.capped = out.capped || !hi.reached || !lo.reached;
    return hi.offset - lo.offset;
  };

  out.theta_cut_deg = meridian_width(peak);
  if (peak.theta_deg < options.pole_theta_deg) {
    out.second_cut_deg = meridian_width({peak.theta_deg, wrap_phi(peak.phi_deg + 90.0)});
  } else {
    auto f = [&](double t) { return safe_sample(sampler, {peak.theta_deg, wrap_phi(peak.phi_deg + t)}); };
    const Edge hi = find_edge(f, level, +1.0, step, 180.0);
    const Edge lo = find_edge(f, level, -1.0, step, 180.0);
    out.capped = out.capped || !hi.reached || !lo.reached;
    out.second_cut_deg = (hi.offset - lo.offset) * std::sin(peak.theta_deg * kDegToRad);
  }
  out.width_deg = 0.5 * (out.theta_cut_deg + out.second_cut_deg);
  return out;
}

BeamWidth hpbw(const FarFieldPattern& pattern, const Lobe& main_lobe, const HpbwOptions& options) {
  FieldSampler sampler = [&](Direction d) { return interpolate(pattern, d); };
  return hpbw(sampler, main_lobe.peak, main_lobe.peak_magnitude, options);
}

std::string flags_to_string(unsigned flags) {
  static constexpr std::pair<unsigned, const char*> kNames[] = {
      {kFlagPole, "pole"}, {kFlagSingleLobe, "single_lobe"}, {kFlagHpbwCapped, "hpbw_capped"}, {kFlagError, "error"}};
  std::string out;
  for (const auto& [bit, name] : kNames) {
    if (!(flags & bit)) continue;
    if (!out.empty()) out += '|';
    out += name;
  }
  return out;
}

Peak refine_peak(const FieldSampler& sampler, const FarFieldPattern& survey, const LobeMap& map, int lobe,
                 const MetricsOptions& options) {
  const auto& g = survey.grid;
  const Lobe& l = map.lobes.at(lobe);
  Peak best{l.peak, sampler(l.peak)};
  const double w = options.refine_half_window_deg;
  const double s = options.refine_step_deg;
  const int nt = static_cast<int>(std::floor(2 * w / s + 1e-9));
  const bool around_pole = l.peak.theta_deg - w < 0.0;
  // Across the pole the window becomes a polar cap; 1 degree in phi is finer
  // than `s` in arc length there.
  const double phi_step = around_pole ? std::max(s, 1.0) : s;
  const int np = around_pole ? static_cast<int>(std::lround(360.0 / phi_step)) : nt + 1;
  for (int a = 0; a <= nt; ++a) {
    const double theta = l.peak.theta_deg - w + a * s;
    if (theta < 0.0 || theta > 90.0) continue;
    for (int b = 0; b < np; ++b) {
      const double phi = around_pole ? b * phi_step : wrap_phi(l.peak.phi_deg - w + b * s);
      const Direction d{theta, phi};
      if (map.label[nearest_sample(g, d)] != lobe) continue;
      const double m = sampler(d);
      if (m > best.magnitude) best = {d, m};
    }
  }
  return best;
}

MetricsReport compute_metrics(const FarFieldPattern& survey, const SteeringTarget& target, double reference,
                              const FieldSampler* exact, const MetricsOptions& options) {
  if (!(reference > 0.0)) fail(ErrorCode::InvalidArgument, "normalization reference must be positive");
  LobeMap map = segment(survey, options.lobes);
  std::vector<bool> refined(map.lobes.size(), false);
  auto refine = [&](std::size_t k) {
    if (!exact || refined[k]) return;
    const Peak p = refine_peak(*exact, survey, map, static_cast<int>(k), options);
    map.lobes[k].peak = p.direction;
    map.lobes[k].peak_magnitude = p.magnitude;
    refined[k] = true;
  };

  // Any lobe within 3 dB of the strongest sample could own the true maximum.
  if (exact) {
    const double contender = map.lobes[0].peak_magnitude * std::pow(10.0, -3.0 / 20.0);
    for (std::size_t k = 0; k < map.lobes.size() && map.lobes[k].peak_magnitude >= contender; ++k) refine(k);
    std::vector<std::size_t> order(map.lobes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return map.lobes[a].peak_magnitude > map.lobes[b].peak_magnitude;
    });
    std::vector<bool> r2(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) r2[k] = refined[order[k]];
    sort_lobes(map);
    refined = std::move(r2);
  }

  MetricsReport rep;
  const Lobe& main = map.lobes[0];
  rep.actual = main.peak;
  rep.peak_magnitude = main.peak_magnitude;
  rep.n_lobes = static_cast<int>(map.lobes.size());
  rep.td_deg = target_deviation(rep.actual, Direction{target.theta_deg, target.phi_deg});
  if (rep.actual.theta_deg < options.beam.pole_theta_deg) rep.flags |= kFlagPole;
  rep.d_target_db = directivity_at(survey, {target.theta_deg, target.phi_deg}, reference, options.floor_db);
  rep.d_actual_db = to_db(rep.peak_magnitude, reference, options.floor_db);

  if (map.lobes.size() < 2) {
    rep.sll_db = rep.sll_max_db = rep.sla_db = options.floor_db;
    rep.flags |= kFlagSingleLobe;
  } else {
    std::size_t nearest = 1;
    double best = great_circle_deg(main.peak, map.lobes[1].peak);
    for (std::size_t k = 2; k < map.lobes.size(); ++k) {
      const double d = great_circle_deg(main.peak, map.lobes[k].peak);
      if (d < best) {
        best = d;
        nearest = k;
      }
    }
    refine(nearest);
    refine(1);
    const double main_peak = map.lobes[0].peak_magnitude;
    const double near_peak = std::min(map.lobes[nearest].peak_magnitude, main_peak);
    const double max_peak = std::min(std::max(map.lobes[1].peak_magnitude, near_peak), main_peak);
    rep.sll_db = to_db(near_peak, main_peak, options.floor_db);
    rep.sll_max_db = to_db(max_peak, main_peak, options.floor_db);
    rep.sla_db = sla(map.lobes, options.sla, options.floor_db);
  }

  FieldSampler interp = [&](Direction d) { return interpolate(survey, d); };
  const FieldSampler& sampler = exact ? *exact : interp;
  const BeamWidth bw = hpbw(sampler, rep.actual, rep.peak_magnitude, options.beam);
  rep.hpbw_deg = bw.width_deg;
  if (bw.capped) rep.flags |= kFlagHpbwCapped;
  rep.lobes = std::move(map.lobes);
  return rep;
}

MetricsReport analyze(const ReflectionGrid& grid, const PatternEvaluator& evaluator, const SteeringTarget& target,
                      double reference, const MetricsOptions& options) {
  const FarFieldPattern survey = evaluator.evaluate(grid, reference);
  const FieldProbe probe(grid);
  FieldSampler exact = [&](Direction d) { return probe.magnitude(d.theta_deg, d.phi_deg); };
  return compute_metrics(survey, target, reference, &exact, options);
}

}  // namespace msfault
