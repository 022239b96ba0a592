#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rbmld/kernel.hpp"

using namespace rbmld;

TEST_CASE("packed kernel is real and independent of the circle radius") {
  const Deviation a(1.0);
  const PackedKernel k(a, 4.0);
  const auto v = k(0.3, 0.7);
  CHECK(v.value == doctest::Approx(7.550797077607e-06).epsilon(1e-9));
  CHECK(acceptable_residue(v.value, v.im_residue));
  for (double scale : {0.85, 1.15}) {
    const PackedKernel kk(a, 4.0, ContourConfig{}, scale);
    for (double x : {0.0, 0.5, 2.0})
      for (double y : {0.0, 1.0})
        CHECK(kk(x, y).value == doctest::Approx(k(x, y).value).epsilon(1e-10));
  }
}

TEST_CASE("matrix form agrees with pointwise evaluation") {
  const PackedKernel k(Deviation(0.6), 3.0);
  const std::vector<double> xs{0.0, 0.4, 1.5};
  const Eigen::MatrixXcd m = k.matrix(xs, xs);
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j)
      CHECK(m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)).real() ==
            doctest::Approx(k(xs[i], xs[j]).value).epsilon(1e-13));
}

TEST_CASE("diagonal is positive and decays") {
  for (double t : {2.0, 6.0}) {
    const PackedKernel pk(Deviation(1.0), t);
    const FlatKernel fk(Deviation(1.0), t);
    double prev_p = HUGE_VAL, prev_f = HUGE_VAL;
    for (double x = 0.0; x < 4.0; x += 0.5) {
      const double p = pk(x, x).value, f = fk(x, x).value;
      CHECK(p > 0.0);
      CHECK(f > 0.0);
      CHECK(p < prev_p);
      CHECK(f < prev_f);
      prev_p = p;
      prev_f = f;
    }
  }
}

TEST_CASE("flat kernel does not depend on the truncation of the contour") {
  ContourConfig wide;
  wide.tau_max = 6.0;
  const FlatKernel k4(Deviation(1.0), 8.0), k6(Deviation(1.0), 8.0, wide);
  CHECK(k4(0, 0).value == doctest::Approx(1.994060196150950e-06).epsilon(1e-9));
  CHECK(k6(0, 0).value == doctest::Approx(k4(0, 0).value).epsilon(1e-12));
  CHECK(k6(0.5, 1.2).value == doctest::Approx(k4(0.5, 1.2).value).epsilon(1e-12));
}

TEST_CASE("refined evaluations report a small change") {
  const auto p = khat_packed(Deviation(1.0), 4.0, 0.2, 0.1);
  CHECK(p.refinement_delta < 1e-10 * std::abs(p.value));
  const auto f = khat_flat(Deviation(1.0), 4.0, 0.2, 0.1);
  CHECK(f.refinement_delta < 1e-10 * std::abs(f.value));
}

TEST_CASE("scaled kernels approach the limit kernel") {
  const Deviation a(1.0);
  const auto lim_p = klimit(InitialCondition::packed, a);
  const auto lim_f = klimit(InitialCondition::flat, a);
  const double rp = rate_packed(a), rf = rate_flat(a).rate;
  double prev_p = HUGE_VAL, prev_f = HUGE_VAL;
  for (double t : {4.0, 16.0, 64.0}) {
    const double kp = t * std::exp(t * rp) * PackedKernel(a, t)(0.5, 0.5).value;
    const double kf = std::sqrt(t) * std::exp(t * rf) * FlatKernel(a, t)(0.5, 0.5).value;
    const double ep = std::abs(kp / lim_p(0.5, 0.5) - 1.0);
    const double ef = std::abs(kf / lim_f(0.5, 0.5) - 1.0);
    CHECK(ep < prev_p);
    CHECK(ef < prev_f);
    prev_p = ep;
    prev_f = ef;
  }
  CHECK(prev_p < 0.05);
  CHECK(prev_f < 0.05);
}

TEST_CASE("limit prefactors") {
  for (double av : {0.5, 1.0, 3.0}) {
    const Deviation a(av);
    const double four_pi2 = 4 * std::numbers::pi * std::numbers::pi;
    CHECK(limit_prefactor(InitialCondition::packed, a) * four_pi2 ==
          doctest::Approx(quoted_prefactor(InitialCondition::packed, a)).epsilon(1e-12));
    CHECK(limit_prefactor(InitialCondition::flat, a) ==
          doctest::Approx(quoted_prefactor(InitialCondition::flat, a)).epsilon(1e-12));
    CHECK(limit_prefactor(InitialCondition::packed, a) > 0.0);
    CHECK(limit_prefactor(InitialCondition::flat, a) > 0.0);
  }
}

TEST_CASE("stationary pieces are finite and continue in rho") {
  const StationaryKernel k(Deviation(1.0), 4.0);
  CHECK(std::isfinite(k.r_hat(0.0)));
  CHECK(std::isfinite(k.f_hat(0.0)));
  const std::vector<double> xi{0.0, 0.5, 1.0};
  const Eigen::VectorXd g1 = k.g_one(xi);
  const Eigen::VectorXd g099 = k.g_rho(xi, 0.999);
  CHECK((g1 - g099).cwiseAbs().maxCoeff() < 0.05 * (1 + g1.cwiseAbs().maxCoeff()));
  // r_hat' against a difference quotient
  const double h = 1e-4;
  CHECK(k.r_hat_prime(0.0) == doctest::Approx((k.r_hat(h) - k.r_hat(-h)) / (2 * h)).epsilon(1e-5));
}

TEST_CASE("imaginary residues vanish") {
  for (double av : {0.1, 1.0, 10.0})
    for (double t : {1.0, 4.0, 16.0}) {
      const Deviation a(av);
      const PackedKernel pk(a, t);
      const FlatKernel fk(a, t);
      for (double x : {0.0, 0.8, 3.0}) {
        CHECK(pk(x, 0.4).im_residue < 1e-10);
        CHECK(fk(x, 0.4).im_residue < 1e-10);
      }
    }
  CHECK(acceptable_residue(1.0, 1e-11));
  CHECK_FALSE(acceptable_residue(1.0, 1e-6));
}
