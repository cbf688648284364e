// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <string>

#include "error.hpp"
#include "generators.hpp"
#include "palette.hpp"

using namespace msfault;

TEST_SUITE("palette") {
  TEST_CASE("default palette has four 0.9 states at 45/135/225/315") {
    const auto& p = default_palette();
    REQUIRE(p.size() == 4);
    const double phases[] = {45, 135, 225, 315};
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(p.state(i).gamma == 0.9);
      CHECK(p.state(i).phi_deg == phases[i]);
      CHECK(p.label(i) == "s" + std::to_string(i));
    }
    CHECK(default_palette().states()[0].gamma == 0.9);
  }

  TEST_CASE("default phases are evenly spaced by 90 degrees") {
    const auto& p = default_palette();
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(circular_phase_distance(p.state(i).phi_deg, p.state((i + 1) % p.size()).phi_deg) == doctest::Approx(90.0));
    }
  }

  TEST_CASE("default palette is constant") {
    CHECK(&default_palette() == &default_palette());
    CHECK(default_palette() == StatePalette({{0.9, 45}, {0.9, 135}, {0.9, 225}, {0.9, 315}}));
  }

  TEST_CASE("amplitude outside [0, 1] is rejected") {
    try {
      StatePalette({{1.2, 0}, {0.9, 180}});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OutOfRange);
      CHECK(std::string(e.what()).find("amplitude out of range") != std::string::npos);
    }
    CHECK_THROWS_AS(make_response(-0.1, 0), Error);
  }

  TEST_CASE("duplicate phases and too few states are rejected") {
    CHECK_THROWS_AS(StatePalette({{0.9, 10}, {0.9, 370}}), Error);
    CHECK_THROWS_AS(StatePalette({{0.9, 10}}), Error);
    CHECK_THROWS_AS(StatePalette({{0.9, 10}, {0.9, 20}}, {"a"}), Error);
  }

  TEST_CASE("two-state 1-bit palette is valid") {
    const StatePalette p({{1.0, 0}, {1.0, 180}});
    CHECK(p.size() == 2);
    CHECK(p.nearest_state(10) == 0);
    CHECK(p.nearest_state(170) == 1);
  }

  TEST_CASE("phases are stored canonically") {
    CHECK(make_response(0.5, -90).phi_deg == 270.0);
    CHECK(make_response(0.5, 720).phi_deg == 0.0);
    CHECK(canonical_phase(360.0) == 0.0);
    CHECK(canonical_phase(-1e-20) >= 0.0);
    CHECK(canonical_phase(-1e-20) < 360.0);
  }

  TEST_CASE("circular phase distance examples") {
    CHECK(circular_phase_distance(350, 45) == doctest::Approx(55));
    CHECK(circular_phase_distance(53, 45) == doctest::Approx(8));
    CHECK(circular_phase_distance(123.4, 123.4) == 0.0);
  }

  TEST_CASE("circular phase distance is symmetric, bounded and zero only for congruent phases") {
    testing::Gen gen(11);
    for (int i = 0; i < 2000; ++i) {
      const double a = gen.uniform(-720, 720), b = gen.uniform(-720, 720);
      const double d = circular_phase_distance(a, b);
      CHECK(d == doctest::Approx(circular_phase_distance(b, a)));
      CHECK(d >= 0.0);
      CHECK(d <= 180.0);
      CHECK(circular_phase_distance(a, a + 360.0 * gen.integer(-3, 3)) == doctest::Approx(0.0).epsilon(1e-9));
      if (d < 1e-12) CHECK(canonical_phase(a) == doctest::Approx(canonical_phase(b)));
    }
  }

  TEST_CASE("nearest state breaks exact ties toward the lower index") {
    const auto& p = default_palette();
    CHECK(p.nearest_state(90) == 0);
    CHECK(p.nearest_state(180) == 1);
    CHECK(p.nearest_state(270) == 2);
    CHECK(p.nearest_state(0) == 0);
    CHECK(p.nearest_state(53) == 0);
    CHECK(p.nearest_state(188) == 2);
  }
}
