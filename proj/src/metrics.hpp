// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "coding.hpp"
#include "farfield.hpp"

namespace msfault {

struct Direction {
  double theta_deg = 0.0;
  double phi_deg = 0.0;
};

/// Angle between two directions on the unit sphere, degrees.
double great_circle_deg(Direction a, Direction b);

struct Lobe {
  Direction peak;
  double peak_magnitude = 0.0;
  std::vector<std::size_t> members;  // indices into the pattern's samples
  double power = 0.0;                // sum of |E|^2 times sample solid angle
};

struct LobeOptions {
  double floor_db = -30.0;  // relative to the pattern maximum
};

/// Lobes plus the per-sample lobe id (-1 below the floor).
struct LobeMap {
  std::vector<Lobe> lobes;  // sorted by peak magnitude, descending
  std::vector<int> label;   // same indexing as FarFieldPattern::magnitude
};

/// Discrete watershed: every sample above the floor climbs its steepest
/// uphill neighbour (8-neighbourhood, phi wrapping, all theta=0 samples one
/// pole node) and joins the basin of the local maximum it reaches.
LobeMap segment(const FarFieldPattern& pattern, const LobeOptions& options = {});
std::vector<Lobe> segment_lobes(const FarFieldPattern& pattern, const LobeOptions& options = {});

/// Solid angle carried by one sample of theta row `i` (band integral times dphi).
double sample_solid_angle(const AngularGrid& grid, int i);

/// sqrt(dtheta^2 + dphi^2), dphi the cyclic difference in (-180, 180].
double target_deviation(Direction actual, Direction target);
/// Same, with `actual` the pattern's arg-max sample.
double target_deviation(const FarFieldPattern& pattern, const SteeringTarget& target);

/// Bilinear interpolation of |E| between grid samples (phi wraps).
double interpolate(const FarFieldPattern& pattern, Direction direction);

/// 20 log10(|E(direction)| / reference), bilinear between samples.
double directivity_at(const FarFieldPattern& pattern, Direction direction, double reference,
                      double floor_db = kDefaultFloorDb);

struct SideLobeLevels {
  double nearest_db = kDefaultFloorDb;  // side lobe closest to the main beam
  double largest_db = kDefaultFloorDb;  // strongest side lobe
  bool single_lobe = true;
};

/// Peak ratios against lobes[0]; nearest means smallest great-circle distance
/// between peak directions.
SideLobeLevels side_lobe_levels(std::span<const Lobe> lobes, double floor_db = kDefaultFloorDb);
double sll(std::span<const Lobe> lobes, double floor_db = kDefaultFloorDb);

enum class SlaConvention {
  IntegratedPower,  // sum of side-lobe integrated power / main-lobe power
  PeakSum,          // sum of side-lobe peak power / main peak power
};

/// 10 log10(side / main) under `convention`; floor when there are no side lobes.
double sla(std::span<const Lobe> lobes, SlaConvention convention = SlaConvention::IntegratedPower,
           double floor_db = kDefaultFloorDb);

/// |E| at an arbitrary direction.
using FieldSampler = std::function<double(Direction)>;

struct BeamWidth {
  double width_deg = 0.0;
  double theta_cut_deg = 0.0;
  double second_cut_deg = 0.0;  // phi cut (arc length), or orthogonal meridian at the pole
  bool capped = false;
};

struct HpbwOptions {
  double level_db = -3.0;
  double march_step_deg = 0.25;
  double pole_theta_deg = 1.0;
};

/// Half-power width: (theta-cut width + phi-cut width * sin(theta_a)) / 2, each
/// edge located by marching out from the peak and bisecting. Near the pole the
/// phi cut is replaced by the meridian at phi_a + 90.
BeamWidth hpbw(const FieldSampler& sampler, Direction peak, double peak_magnitude, const HpbwOptions& options = {});
/// Same on a sampled pattern via bilinear interpolation.
BeamWidth hpbw(const FarFieldPattern& pattern, const Lobe& main_lobe, const HpbwOptions& options = {});

enum MetricFlag : unsigned {
  kFlagPole = 1u << 0,        // main lobe at the pole, phi_a ill-defined
  kFlagSingleLobe = 1u << 1,  // no side lobe: sll/sll_max/sla are the floor
  kFlagHpbwCapped = 1u << 2,  // -3 dB edge not reached
  kFlagError = 1u << 3,       // trial failed
};

/// "pole|single_lobe" style rendering; empty when no flag is set.
std::string flags_to_string(unsigned flags);

struct MetricsOptions {
  LobeOptions lobes;
  double floor_db = kDefaultFloorDb;
  double refine_step_deg = 0.25;
  double refine_half_window_deg = 5.0;
  SlaConvention sla = SlaConvention::IntegratedPower;
  HpbwOptions beam;
};

struct MetricsReport {
  double td_deg = 0.0;
  double d_target_db = 0.0;
  double d_actual_db = 0.0;
  double sll_db = 0.0;
  double sll_max_db = 0.0;
  double sla_db = 0.0;
  double hpbw_deg = 0.0;
  Direction actual;
  double peak_magnitude = 0.0;
  int n_lobes = 0;
  unsigned flags = 0;
  std::vector<Lobe> lobes;
};

/// Refines a lobe peak on a local grid, staying inside the lobe's basin.
struct Peak {
  Direction direction;
  double magnitude = 0.0;
};
Peak refine_peak(const FieldSampler& sampler, const FarFieldPattern& survey, const LobeMap& map, int lobe,
                 const MetricsOptions& options = {});

/// All metrics from a survey pattern. When `exact` is given, lobe peaks are
/// refined and beam edges bisected on the true field; otherwise everything
/// comes from the sampled pattern. `reference` is the golden peak magnitude.
MetricsReport compute_metrics(const FarFieldPattern& survey, const SteeringTarget& target, double reference,
                              const FieldSampler* exact = nullptr, const MetricsOptions& options = {});

/// Survey pattern plus refinement on the grid's exact field.
MetricsReport analyze(const ReflectionGrid& grid, const PatternEvaluator& evaluator, const SteeringTarget& target,
                      double reference, const MetricsOptions& options = {});

}  // namespace msfault
