// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace msfault {

/// Seedable portable generator. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; the draws below are written out by
/// hand because std:: distributions differ between library vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound), bound > 0. Rejection on the top of the
  /// 64-bit range keeps it unbiased.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random mantissa bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool coin() { return (next_u64() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// FNV-1a, 64-bit.
std::uint64_t hash_label(std::string_view label) noexcept;

/// Seed of one (scenario, rate, trial) cell of a sweep:
///   h = mix64(root); h = mix64(h ^ hash_label(label)); h = mix64(h ^ rate); h = mix64(h ^ trial)
/// Independent of how many cells exist or in which order they run.
std::uint64_t substream_seed(std::uint64_t root_seed, std::string_view scenario_label, std::uint64_t rate_index,
                             std::uint64_t trial_index) noexcept;

}  // namespace msfault
