#include "rbmld/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "rbmld/lambert.hpp"

namespace rbmld {

namespace {
constexpr double pi = std::numbers::pi;
}

void ContourConfig::validate() const {
  if (points_per_unit < 8) throw invalid_argument("points_per_unit must be >= 8");
  if (!(truncation_tol > 0.0 && truncation_tol <= 1e-8))
    throw invalid_argument("truncation_tol must lie in (0, 1e-8]");
  if (!(tau_max > 0.0) || !std::isfinite(tau_max)) throw invalid_argument("tau_max must be > 0");
}

ContourPath build_circle(double radius, std::size_t count, ContourRole role) {
  if (!(radius > 0.0)) throw invalid_argument("circle radius must be > 0");
  if (count < 3) throw invalid_argument("circle needs at least 3 nodes");
  if (count % 2 == 0) ++count;
  ContourPath p;
  p.role = role;
  p.closed = true;
  p.param_lo = -pi;
  p.param_hi = pi;
  const double h = 2.0 * pi / static_cast<double>(count);
  const auto half = static_cast<std::ptrdiff_t>(count / 2);
  p.params.reserve(count);
  for (std::ptrdiff_t j = -half; j <= half; ++j) {
    const double th = h * static_cast<double>(j);
    const cplx z = -radius * std::polar(1.0, th);
    p.params.push_back(th);
    p.nodes.push_back(z);
    p.tangents.push_back(cplx(0.0, 1.0) * z);
    p.weights.push_back(h * cplx(0.0, 1.0) * z);
  }
  p.critical = static_cast<std::size_t>(half);
  return p;
}

ContourPath build_vertical_line(double x, double half_height, double h) {
  if (!(h > 0.0) || !(half_height >= 0.0)) throw invalid_argument("bad line discretisation");
  ContourPath p;
  p.role = ContourRole::w_line;
  p.closed = false;
  const auto n = static_cast<std::ptrdiff_t>(std::ceil(half_height / h));
  p.param_lo = -h * static_cast<double>(n);
  p.param_hi = h * static_cast<double>(n);
  for (std::ptrdiff_t j = -n; j <= n; ++j) {
    const double y = h * static_cast<double>(j);
    p.params.push_back(y);
    p.nodes.emplace_back(x, y);
    p.tangents.emplace_back(0.0, 1.0);
    p.weights.emplace_back(0.0, h);
  }
  p.critical = static_cast<std::size_t>(n);
  return p;
}

std::size_t circle_node_count(Deviation a, double t, const ContourConfig& cfg) {
  const double r = -saddle_packed(a).saddle_hi;
  const double base = std::ceil(2.0 * pi * cfg.points_per_unit);
  const double spectral = std::ceil(3.0 * (t * r * (2.0 + a.value() + r) + t + 30.0));
  auto n = static_cast<std::size_t>(std::max(base, spectral));
  return n % 2 == 0 ? n + 1 : n;
}

std::pair<ContourPath, ContourPath> build_packed_contours(Deviation a, double t,
                                                          const ContourConfig& cfg,
                                                          double radius_scale) {
  cfg.validate();
  if (!(t > 0.0) || !std::isfinite(t)) throw invalid_argument("t must be finite and > 0");
  if (!(radius_scale > 0.0)) throw invalid_argument("radius_scale must be > 0");
  const auto sd = saddle_packed(a);
  const double wm = sd.saddle_lo;
  const double r = -sd.saddle_hi * radius_scale;
  if (r >= 1.0 || r >= -wm) throw invalid_argument("circle radius must stay inside the line and below 1");

  // Re H(w_- + iy) - H(w_-) = -y^2/2 + log(1 + y^2/w_-^2)/2 decreases in |y|.
  const double target = std::log(1.0 / cfg.truncation_tol);
  auto drop = [&](double y) { return t * (y * y / 2.0 - 0.5 * std::log1p(y * y / (wm * wm))); };
  double y = 1.0;
  while (drop(y) < target) y *= 1.5;
  double lo = 0.0, hi = y;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (drop(mid) < target ? lo : hi) = mid;
  }
  ContourPath line = build_vertical_line(wm, hi, 1.0 / cfg.points_per_unit);
  ContourPath circle = build_circle(r, circle_node_count(a, t, cfg), ContourRole::z_circle);
  return {std::move(line), std::move(circle)};
}

namespace {

// log with arg in (0, 2 pi): continuous on the flat contour, which never
// meets the positive real axis.
cplx log_upper(cplx w) {
  double arg = std::arg(w);
  if (arg <= 0.0) arg += 2.0 * pi;
  return {std::log(std::abs(w)), arg};
}

cplx solve_gamma(cplx rhs, cplx w) {
  for (int it = 0; it < 50; ++it) {
    const cplx f = w + log_upper(w) - rhs;
    const cplx step = f / (1.0 + 1.0 / w);
    w -= step;
    if (std::abs(step) <= 1e-15 * std::abs(w)) return w;
  }
  const cplx f = w + log_upper(w) - rhs;
  if (std::abs(f) > 1e-12 * (1.0 + std::abs(rhs))) throw numeric_failure("flat contour: Newton stalled", w, std::abs(f));
  return w;
}

}  // namespace

FlatContour build_flat_contour(Deviation a, const ContourConfig& cfg) {
  cfg.validate();
  const double za = solve_za(a);
  // The parametrisation is singular where gamma = -1, at imaginary tau-distance d.
  const double d = std::abs(std::log(-za) + za + 1.0) / (2.0 * pi);
  const double ppu = std::max<double>(cfg.points_per_unit, std::ceil(6.0 / d));
  const double h = 1.0 / ppu;
  const auto n = static_cast<std::size_t>(std::ceil(cfg.tau_max * ppu));
  const cplx c0(za + std::log(-za), pi);
  const cplx zeta0 = za * std::exp(za);

  std::vector<cplx> g(n + 1), f(n + 1);
  g[0] = za;
  f[0] = phi(za);
  for (std::size_t j = 1; j <= n; ++j) {
    const double tau = h * static_cast<double>(j);
    const cplx prev = g[j - 1];
    // Heun predictor with gamma' = 2 pi i gamma / (1 + gamma).
    auto deriv = [](cplx w) { return cplx(0.0, 2.0 * pi) * w / (1.0 + w); };
    const cplx k1 = deriv(prev);
    const cplx k2 = deriv(prev + h * k1);
    const cplx guess = prev + 0.5 * h * (k1 + k2);
    g[j] = solve_gamma(c0 + cplx(0.0, 2.0 * pi * tau), guess);
    f[j] = lambert_w(0, zeta0 * std::polar(1.0, 2.0 * pi * tau));
    const double local = h * std::abs(deriv(g[j]));
    if (std::abs(g[j] - prev) > 10.0 * std::max(local, h * std::abs(deriv(prev))))
      throw numeric_failure("flat contour discontinuous near tau = " + std::to_string(tau), g[j]);
  }

  FlatContour fc;
  fc.z_a = za;
  fc.step = h;
  ContourPath& p = fc.path;
  p.role = ContourRole::lambert_gamma;
  p.closed = false;
  p.param_lo = -h * static_cast<double>(n);
  p.param_hi = h * static_cast<double>(n);
  p.critical = n;
  const std::size_t total = 2 * n + 1;
  p.params.resize(total);
  p.nodes.resize(total);
  p.tangents.resize(total);
  p.weights.resize(total);
  fc.phi_nodes.resize(total);
  for (std::size_t j = 0; j <= n; ++j) {
    const cplx tan = cplx(0.0, 2.0 * pi) * g[j] / (1.0 + g[j]);
    const double tau = h * static_cast<double>(j);
    for (int side : {1, -1}) {
      if (j == 0 && side == -1) continue;
      const std::size_t idx = side == 1 ? n + j : n - j;
      const bool up = side == 1;
      p.params[idx] = side * tau;
      p.nodes[idx] = up ? g[j] : std::conj(g[j]);
      // gamma(-tau) = conj(gamma(tau)) so gamma'(-tau) = -conj(gamma'(tau)).
      p.tangents[idx] = up ? tan : -std::conj(tan);
      p.weights[idx] = h * p.tangents[idx];
      fc.phi_nodes[idx] = up ? f[j] : std::conj(f[j]);
    }
  }
  return fc;
}

SteepDescentReport steep_descent_report(const ContourPath& path,
                                        const std::function<double(std::size_t)>& phase,
                                        double delta) {
  const double ninf = -std::numeric_limits<double>::infinity();
  SteepDescentReport r{ninf, ninf, std::numeric_limits<double>::infinity()};
  if (path.size() == 0) return r;
  for (std::size_t j = 0; j < path.size(); ++j) {
    const double v = phase(j);
    if (std::abs(path.params[j]) >= delta)
      r.max_exterior = std::max(r.max_exterior, v);
    else
      r.max_interior = std::max(r.max_interior, v);
  }
  if (r.max_exterior > ninf) r.epsilon = phase(path.critical) - r.max_exterior;
  return r;
}

}  // namespace rbmld
