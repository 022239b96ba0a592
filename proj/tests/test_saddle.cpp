#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rbmld/lambert.hpp"
#include "rbmld/saddle.hpp"

using namespace rbmld;

// a = 1 reference values from mpmath (root finding on the defining equations).
TEST_CASE("rates at a = 1") {
  const Deviation a(1.0);
  const auto s = saddle_packed(a);
  CHECK(s.saddle_lo == doctest::Approx(-2.61803398874989485).epsilon(1e-14));
  CHECK(s.saddle_hi == doctest::Approx(-0.381966011250105152).epsilon(1e-14));
  CHECK(rate_packed(a) == doctest::Approx(1.42925466601127075).epsilon(1e-13));
  CHECK(rate_stat(a) == doctest::Approx(0.464627333005635377).epsilon(1e-13));
  const auto f = rate_flat(a);
  CHECK(solve_za(a) == doctest::Approx(-2.40757608581580464).epsilon(1e-13));
  CHECK(f.saddle_hi == doctest::Approx(-0.289558830902971191).epsilon(1e-13));
  CHECK(f.rate == doctest::Approx(1.37974536360653927).epsilon(1e-13));
}

TEST_CASE("deviation must be positive and finite") {
  CHECK_THROWS_AS(Deviation{0.0}, invalid_argument);
  CHECK_THROWS_AS(Deviation{-1.0}, invalid_argument);
  CHECK_THROWS_AS(Deviation{std::nan("")}, invalid_argument);
  CHECK_THROWS_AS(Deviation{HUGE_VAL}, invalid_argument);
}

TEST_CASE("packed saddles are reciprocal critical points with opposite curvature") {
  for (double av : {0.01, 0.3, 1.0, 7.0, 100.0}) {
    const Deviation a(av);
    const auto s = saddle_packed(a);
    CHECK(s.saddle_lo * s.saddle_hi == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(phase_packed_d1(s.saddle_lo, a)) < 1e-12 * (1 + av));
    CHECK(std::abs(phase_packed_d1(s.saddle_hi, a)) < 1e-12 * (1 + av));
    CHECK(s.second_lo > 0.0);
    CHECK(s.second_hi < 0.0);
    CHECK(phase_packed_d2(s.saddle_lo).real() == doctest::Approx(s.second_lo));
  }
}

TEST_CASE("saddle phase values have opposite signs") {
  for (double av = 0.01; av < 100; av *= 1.5) {
    const auto s = saddle_packed(Deviation(av));
    CHECK(s.phase_hi > 0.0);
    CHECK(s.phase_lo < 0.0);
    CHECK(s.phase_hi < -s.phase_lo);
  }
}

TEST_CASE("rate functions are positive, increasing and ordered") {
  double prev_p = 0, prev_f = 0, prev_s = 0;
  for (double av = 0.05; av < 20; av *= 1.3) {
    const Deviation a(av);
    const double p = rate_packed(a), f = rate_flat(a).rate, s = rate_stat(a);
    CHECK(p > prev_p);
    CHECK(f > prev_f);
    CHECK(s > prev_s);
    CHECK(p > f);
    CHECK(f > s);
    prev_p = p;
    prev_f = f;
    prev_s = s;
  }
}

TEST_CASE("flat saddle is the maximum of -G on (-inf, -1)") {
  const Deviation a(2.5);
  const double z = solve_za(a);
  CHECK(phase_flat_d1(z, a) == doctest::Approx(0.0).scale(1.0).epsilon(1e-11));
  for (double dz : {-0.3, -0.01, 0.01, 0.3})
    CHECK(-phase_flat(z + dz, a) < -phase_flat(z, a));
  CHECK(rate_flat(a).second_lo > 0.0);
  // complex phase agrees with the real one on the axis
  CHECK(phase_flat(cplx(z), cplx(phi(z)), a).real() == doctest::Approx(phase_flat(z, a)).epsilon(1e-14));
}

TEST_CASE("phases reject points off their domains") {
  const Deviation a(1.0);
  CHECK_THROWS_AS(phase_packed(0.0, a), invalid_argument);
  CHECK_THROWS_AS(phase_packed(2.0, a), invalid_argument);
  CHECK_NOTHROW(phase_packed(cplx(2.0, 0.1), a));
  CHECK_THROWS_AS(phase_flat(-1.0, a), invalid_argument);
  CHECK_THROWS_AS(phase_flat(0.5, a), invalid_argument);
}

TEST_CASE("asymptotes bracket the flat rate in their regimes") {
  const Deviation small(1e-3), large(30.0);
  CHECK(rate_flat(small).rate == doctest::Approx(rate_asymptote(InitialCondition::flat, small, Regime::small)).epsilon(1e-3));
  CHECK(rate_flat(large).rate == doctest::Approx(rate_asymptote(InitialCondition::flat, large, Regime::large)).epsilon(1e-6));
  CHECK_THROWS_AS(rate_asymptote(InitialCondition::packed, small, Regime::small), invalid_argument);
}

TEST_CASE("initial condition names round trip") {
  for (auto ic : {InitialCondition::packed, InitialCondition::flat, InitialCondition::stationary})
    CHECK(parse_initial_condition(to_string(ic)) == ic);
  CHECK(parse_initial_condition("stat") == InitialCondition::stationary);
  CHECK_THROWS_AS(parse_initial_condition("wedge"), invalid_argument);
}
