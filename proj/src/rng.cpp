// SPDX-License-Identifier: Apache-2.0

#include "rng.hpp"

#include "error.hpp"

namespace msfault {

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
  if (bound == 0) fail(ErrorCode::InvalidArgument, "uniform_below needs a positive bound");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x < limit) return x % bound;
  }
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t substream_seed(std::uint64_t root_seed, std::string_view scenario_label, std::uint64_t rate_index,
                             std::uint64_t trial_index) noexcept {
  std::uint64_t h = mix64(root_seed);
  h = mix64(h ^ hash_label(scenario_label));
  h = mix64(h ^ rate_index);
  return mix64(h ^ trial_index);
}

}  // namespace msfault
