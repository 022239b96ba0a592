#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rbmld/contour.hpp"
#include "rbmld/lambert.hpp"

using namespace rbmld;

namespace {

template <class F>
cplx integrate(const ContourPath& p, F f) {
  cplx s = 0;
  for (std::size_t j = 0; j < p.size(); ++j) s += f(p.nodes[j]) * p.weights[j];
  return s;
}

}  // namespace

TEST_CASE("circle quadrature reproduces residues") {
  const auto c = build_circle(0.7, 41, ContourRole::z_circle);
  CHECK(c.closed);
  CHECK(c.size() == 41);
  CHECK(c.nodes[c.critical] == cplx(-0.7, 0.0));
  const cplx two_pi_i(0, 2 * std::numbers::pi);
  CHECK(std::abs(integrate(c, [](cplx z) { return 1.0 / z; }) - two_pi_i) < 1e-13);
  CHECK(std::abs(integrate(c, [](cplx z) { return std::exp(z) / (z * z); }) - two_pi_i) < 1e-12);
  CHECK(std::abs(integrate(c, [](cplx z) { return z * z; })) < 1e-13);
  for (const auto& z : c.nodes) CHECK(!(z.imag() == 0.0 && z.real() > 0.0));
}

TEST_CASE("vertical line weights integrate a Gaussian") {
  const auto l = build_vertical_line(-1.5, 12.0, 0.05);
  // int e^{(w+1.5)^2} dw along the line = i sqrt(pi)
  const cplx v = integrate(l, [](cplx w) { return std::exp((w + 1.5) * (w + 1.5)); });
  CHECK(std::abs(v - cplx(0, std::sqrt(std::numbers::pi))) < 1e-12);
  CHECK(l.nodes[l.critical] == cplx(-1.5, 0.0));
}

TEST_CASE("packed contours pass through the saddles") {
  const Deviation a(1.0);
  const auto s = saddle_packed(a);
  const auto [line, circle] = build_packed_contours(a, 4.0, ContourConfig{});
  CHECK(line.nodes[line.critical].real() == doctest::Approx(s.saddle_lo));
  CHECK(std::abs(circle.nodes[circle.critical] - cplx(s.saddle_hi)) < 1e-14);
  CHECK(circle.size() % 2 == 1);
  CHECK(circle.size() == circle_node_count(a, 4.0, ContourConfig{}));
  const auto scaled = build_packed_contours(a, 4.0, ContourConfig{}, 1.1).second;
  CHECK(std::abs(scaled.nodes[scaled.critical]) == doctest::Approx(1.1 * std::abs(s.saddle_hi)));
}

TEST_CASE("flat contour lies on the level curve and is conjugate symmetric") {
  for (double av : {0.1, 1.0, 10.0}) {
    const Deviation a(av);
    const auto fc = build_flat_contour(a, ContourConfig{});
    const double za = solve_za(a);
    CHECK(fc.z_a == doctest::Approx(za));
    CHECK(std::abs(fc.path.nodes[fc.path.critical] - cplx(za)) < 1e-12);
    const std::size_t n = fc.path.size();
    for (std::size_t j = 0; j < n; ++j) {
      const cplx g = fc.path.nodes[j];
      const cplx f = fc.phi_nodes[j];
      CHECK(std::abs(f * std::exp(f) - g * std::exp(g)) < 1e-10 * (1 + std::abs(g * std::exp(g))));
      CHECK(std::abs(fc.path.nodes[n - 1 - j] - std::conj(g)) < 1e-12 * (1 + std::abs(g)));
      // gamma e^gamma winds around z_a e^{z_a} with tau
      CHECK(std::abs(g * std::exp(g) - za * std::exp(za) * std::exp(cplx(0, 2 * std::numbers::pi * fc.path.params[j])))
            < 1e-9 * (1 + std::abs(za * std::exp(za))));
    }
  }
}

TEST_CASE("config validation") {
  ContourConfig c;
  CHECK_NOTHROW(c.validate());
  c.points_per_unit = 4;
  CHECK_THROWS_AS(c.validate(), invalid_argument);
  c = ContourConfig{};
  c.truncation_tol = 1e-3;
  CHECK_THROWS_AS(c.validate(), invalid_argument);
  c = ContourConfig{};
  c.truncation_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), invalid_argument);
}

TEST_CASE("steep descent report") {
  const auto c = build_circle(1.0, 101, ContourRole::z_circle);
  // -Re z peaks at the critical node -1
  const auto r = steep_descent_report(c, [&](std::size_t j) { return -c.nodes[j].real(); }, 0.1);
  CHECK(r.ok());
  CHECK(r.epsilon == doctest::Approx(1.0 - std::cos(c.params[c.critical + 2])).epsilon(1e-12));
  const auto bad = steep_descent_report(c, [&](std::size_t j) { return c.nodes[j].real(); }, 0.1);
  CHECK_FALSE(bad.ok());
  const auto empty = steep_descent_report(c, [&](std::size_t j) { return -c.nodes[j].real(); }, 10.0);
  CHECK(std::isinf(empty.epsilon));
}

TEST_CASE("packed phases along the contours") {
  for (double av : {0.1, 1.0, 10.0}) {
    const Deviation a(av);
    const auto s = saddle_packed(a);
    // Re H(w_- + iy): even in y, decreasing in |y|
    double prev = phase_packed(s.saddle_lo, a).real();
    for (double y = 0.05; y < 20; y += 0.05) {
      const double up = phase_packed(cplx(s.saddle_lo, y), a).real();
      CHECK(up == doctest::Approx(phase_packed(cplx(s.saddle_lo, -y), a).real()).epsilon(1e-14));
      CHECK(up < prev);
      prev = up;
    }
    // on the circle through w_+ the phase -Re H peaks at w_+
    const auto [line, circle] = build_packed_contours(a, 4.0, ContourConfig{});
    const double at_saddle = -phase_packed(circle.nodes[circle.critical], a).real();
    for (std::size_t j = 0; j < circle.size(); ++j)
      if (j != circle.critical) CHECK(-phase_packed(circle.nodes[j], a).real() < at_saddle);
  }
}

TEST_CASE("flat contour tangents follow the level-curve flow") {
  const auto fc = build_flat_contour(Deviation(1.0), ContourConfig{});
  for (std::size_t j = 0; j < fc.path.size(); ++j) {
    const cplx g = fc.path.nodes[j];
    const cplx expect = cplx(0, 2 * std::numbers::pi) * g / (1.0 + g);
    CHECK(std::abs(fc.path.tangents[j] - expect) < 1e-8 * (1 + std::abs(expect)));
  }
  const double top = phase_flat(fc.path.nodes[fc.path.critical], fc.phi_nodes[fc.path.critical], Deviation(1.0)).real();
  for (std::size_t j = 0; j < fc.path.size(); ++j)
    CHECK(phase_flat(fc.path.nodes[j], fc.phi_nodes[j], Deviation(1.0)).real() <= top + 1e-12);
}
