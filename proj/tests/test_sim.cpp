#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "rbmld/sim.hpp"
#include "rbmld/stats.hpp"

using namespace rbmld;

namespace {

double gue2_top_cdf(double s) {
  const double pdf = std::exp(-0.5 * s * s) / std::sqrt(2 * std::numbers::pi);
  return normal_cdf(s) * (normal_cdf(s) - s * pdf) - pdf * pdf;
}

SimConfig packed(int t, int reps, std::uint64_t seed) {
  SimConfig c;
  c.t = t;
  c.dt = 1e-3;
  c.reps = reps;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("validation") {
  SimConfig c;
  CHECK_NOTHROW(c.validate());
  c.t = 0;
  CHECK_THROWS_AS(c.validate(), invalid_argument);
  c = SimConfig{};
  c.dt = 0.05;
  CHECK_THROWS_AS(c.validate(), invalid_argument);
  c = SimConfig{};
  c.reps = 0;
  CHECK_THROWS_AS(c.validate(), invalid_argument);
  c = SimConfig{};
  c.ic = InitialCondition::stationary;
  c.rho = 1.5;
  CHECK_THROWS_AS(c.validate(), invalid_argument);
  CHECK(SimConfig{}.step() == doctest::Approx(1e-4));
  c = SimConfig{};
  c.t = 7;
  CHECK(c.step() == doctest::Approx(7e-4));
  CHECK(c.effective_cutoff() == 28);
}

TEST_CASE("results depend only on the seed, not on the worker count") {
  auto c = packed(3, 40, 11);
  c.workers = 1;
  const auto one = simulate_samples(c).values;
  c.workers = 4;
  const auto four = simulate_samples(c).values;
  CHECK(one == four);
  c.seed = 12;
  CHECK(simulate_samples(c).values != one);
  CHECK(gue_top_sample(3, 1.0, 50, 5, 1) == gue_top_sample(3, 1.0, 50, 5, 3));
}

TEST_CASE("configurations stay ordered") {
  for (auto ic : {InitialCondition::packed, InitialCondition::flat, InitialCondition::stationary}) {
    SimConfig c;
    c.ic = ic;
    c.t = 3;
    c.dt = 1e-3;
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
      const auto x = simulate_configuration(c, ic == InitialCondition::packed ? 1 : -6, 3, 3.0, rep);
      CHECK(std::is_sorted(x.begin(), x.end()));
    }
  }
}

TEST_CASE("initial conditions at time zero") {
  SimConfig c;
  c.ic = InitialCondition::flat;
  const auto flat = simulate_configuration(c, -2, 2, 0.0, 0);
  CHECK(flat == std::vector<double>{-2, -1, 0, 1, 2});
  c.ic = InitialCondition::stationary;
  std::vector<double> gaps;
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    const auto x = simulate_configuration(c, -10, 10, 0.0, rep);
    CHECK(x[10] == 0.0);
    for (std::size_t i = 1; i < x.size(); ++i) gaps.push_back(x[i] - x[i - 1]);
  }
  const auto ks = ks_one_sample(gaps, [](double g) { return g <= 0 ? 0.0 : -std::expm1(-g); });
  CHECK(ks.p_value > 1e-3);
}

TEST_CASE("free lowest particle is Brownian") {
  auto c = packed(1, 4000, 3);
  const auto v = simulate_samples(c).values;
  const auto ks = ks_one_sample(v, normal_cdf);
  CHECK(ks.p_value > 1e-3);
}

TEST_CASE("second packed particle follows the 2x2 GUE law") {
  auto c = packed(2, 4000, 4);
  const auto v = simulate_samples(c).values;
  // x_2(2) = sqrt(2) times the unit-variance top eigenvalue
  const auto ks = ks_one_sample(v, [](double x) { return gue2_top_cdf(x / std::sqrt(2.0)); });
  CHECK(ks.p_value > 1e-3);
  const auto g = gue_top_sample(2, 2.0, 4000, 9, 0);
  CHECK(ks_one_sample(g, [](double x) { return gue2_top_cdf(x / std::sqrt(2.0)); }).p_value > 1e-3);
}

TEST_CASE("GUE 2x2 mean of the top eigenvalue") {
  const auto g = gue_top_sample(2, 1.0, 40000, 21, 0);
  const auto ms = mean_stderr(g);
  CHECK(std::abs(ms.mean - 2.0 / std::sqrt(std::numbers::pi)) < 4 * ms.stderr_);
}

TEST_CASE("tail estimator") {
  SampleBatch b;
  b.config.t = 2;
  b.values = {0.0, 5.0, 7.0, 3.0};
  const auto e = tail_estimate(b, Deviation(1.0));  // level 6
  CHECK(e.hits == 1);
  CHECK(e.p_hat == doctest::Approx(0.25));
  CHECK(e.stderr_ == doctest::Approx(std::sqrt(0.25 * 0.75 / 4)));
  b.values = {0.0, 1.0};
  const auto z = tail_estimate(b, Deviation(1.0));
  CHECK(z.hits == 0);
  CHECK(z.upper_bound == doctest::Approx(1 - std::sqrt(0.05)));
}

TEST_CASE("stationary gaps stay exponential") {
  SimConfig c;
  c.ic = InitialCondition::stationary;
  c.t = 2;
  c.dt = 1e-3;
  c.reps = 150;
  c.seed = 8;
  const auto g = stationary_gap_check(c);
  CHECK(g.ks_p_value > 1e-3);
  CHECK(std::abs(g.mean_gap - 1.0) < 4 * g.mean_stderr);
  c.rho = 0.5;
  CHECK_THROWS_AS(stationary_gap_check(c), invalid_argument);
}

TEST_CASE("statistics helpers") {
  CHECK(kolmogorov_q(0.1) == 1.0);
  CHECK(kolmogorov_q(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-12));
  CHECK(kolmogorov_q(1.36) == doctest::Approx(0.0494).epsilon(1e-2));
  const auto same = ks_two_sample({1, 2, 3, 4}, {1, 2, 3, 4});
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == doctest::Approx(1.0));
  const auto ms = mean_stderr({1, 2, 3, 4});
  CHECK(ms.mean == 2.5);
  CHECK(ms.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("worker count from the environment") {
  setenv("RBMLD_WORKERS", "3", 1);
  CHECK(default_workers() == 3);
  setenv("RBMLD_WORKERS", "junk", 1);
  CHECK(default_workers() >= 1);
  unsetenv("RBMLD_WORKERS");
}
