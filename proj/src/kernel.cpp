#include "rbmld/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rbmld/lambert.hpp"

namespace rbmld {

namespace {

constexpr double pi = std::numbers::pi;
const cplx two_pi_i(0.0, 2.0 * pi);

KernelEval take_real(const cplx& v) { return {v.real(), std::abs(v.imag()), 0.0}; }

void check_residue(const KernelEval& e, const char* who) {
  if (!acceptable_residue(e.value, e.im_residue))
    throw numeric_failure(std::string(who) + ": imaginary residue " + std::to_string(e.im_residue) +
                              " too large; double the contour nodes",
                          cplx(e.value, e.im_residue), e.im_residue);
}

ContourConfig doubled(ContourConfig cfg) {
  cfg.points_per_unit *= 2;
  return cfg;
}

// Half-height beyond which t y^2/2 - n/2 log(1 + y^2/c^2) exceeds log(1/tol).
double line_half_height(double t, double n, double c, double tol) {
  const double target = std::log(1.0 / tol);
  auto drop = [&](double y) { return t * y * y / 2.0 - 0.5 * n * std::log1p(y * y / (c * c)); };
  double y = 1.0;
  while (drop(y) < target) y *= 1.5;
  double lo = 0.0, hi = y;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (drop(mid) < target ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

bool acceptable_residue(double value, double im_residue) {
  return im_residue <= 1e-10 * (1.0 + std::abs(value));
}

void DoubleContourKernel::assemble(ContourPath line, ContourPath circle, std::vector<cplx> log_amp_w,
                                   std::vector<cplx> log_amp_z, double shift) {
  line_ = std::move(line);
  circle_ = std::move(circle);
  aw_ = std::move(log_amp_w);
  bz_ = std::move(log_amp_z);
  shift_ = shift;
  const auto nw = static_cast<Eigen::Index>(line_.size());
  const auto nz = static_cast<Eigen::Index>(circle_.size());
  cauchy_.resize(nw, nz);
  for (Eigen::Index l = 0; l < nz; ++l)
    for (Eigen::Index j = 0; j < nw; ++j)
      cauchy_(j, l) = 1.0 / (line_.nodes[static_cast<std::size_t>(j)] -
                             circle_.nodes[static_cast<std::size_t>(l)]);
}

Eigen::MatrixXcd DoubleContourKernel::line_factors(const std::vector<double>& x) const {
  Eigen::MatrixXcd u(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(line_.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < line_.size(); ++j)
      u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::exp(aw_[j] + x[i] * (line_.nodes[j] + shift_)) * line_.weights[j];
  return u;
}

Eigen::MatrixXcd DoubleContourKernel::circle_factors(const std::vector<double>& x) const {
  Eigen::MatrixXcd v(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(circle_.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t l = 0; l < circle_.size(); ++l)
      v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) =
          std::exp(bz_[l] - x[i] * (circle_.nodes[l] + shift_)) * circle_.weights[l];
  return v;
}

Eigen::MatrixXcd DoubleContourKernel::matrix(const std::vector<double>& x1,
                                             const std::vector<double>& x2) const {
  const Eigen::MatrixXcd uc = line_factors(x1) * cauchy_;
  const Eigen::MatrixXcd k = uc * circle_factors(x2).transpose();
  return k / (two_pi_i * two_pi_i);
}

KernelEval DoubleContourKernel::operator()(double x1, double x2) const {
  return take_real(matrix({x1}, {x2})(0, 0));
}

PackedKernel::PackedKernel(Deviation a, double t, const ContourConfig& cfg, double radius_scale)
    : a_(a), t_(t) {
  auto [line, circle] = build_packed_contours(a, t, cfg, radius_scale);
  std::vector<cplx> aw, bz;
  for (const cplx& w : line.nodes) aw.push_back(t * phase_packed(w, a));
  for (const cplx& z : circle.nodes) bz.push_back(-t * phase_packed(z, a));
  assemble(std::move(line), std::move(circle), std::move(aw), std::move(bz), 1.0);
}

RawPackedKernel::RawPackedKernel(int n, double t, double level, double xi_max, const ContourConfig& cfg) {
  cfg.validate();
  if (n < 0) throw invalid_argument("particle index must be >= 0");
  if (!(t > 0.0) || !std::isfinite(t)) throw invalid_argument("t must be finite and > 0");
  double c = 1.0 / 0.85, r = 0.85;
  if (n > 0) {
    const double m = std::sqrt(n / t);  // geometric mean of the two real saddles
    double ratio = 1.0;
    const double disc = level * level - 4.0 * n * t;
    if (level > 0.0 && disc > 0.0) ratio = (level + std::sqrt(disc)) / (2.0 * t) / m;
    c = m * std::max(ratio, 1.0 / 0.85);
    r = m * std::min(1.0 / ratio, 0.85);
  }
  const double half = line_half_height(t, n, c, cfg.truncation_tol);
  ContourPath line = build_vertical_line(-c, half, 1.0 / cfg.points_per_unit);
  const double spectral = 3.0 * (t * r * r / 2.0 + std::abs(xi_max) * r + n + 20.0);
  const auto count = static_cast<std::size_t>(std::max(std::ceil(2.0 * pi * cfg.points_per_unit), spectral));
  ContourPath circle = build_circle(r, count, ContourRole::z_circle);
  const double nn = n;
  std::vector<cplx> aw, bz;
  for (const cplx& w : line.nodes) aw.push_back(t * w * w / 2.0 + nn * std::log(-w));
  for (const cplx& z : circle.nodes) bz.push_back(-(t * z * z / 2.0 + nn * std::log(-z)));
  assemble(std::move(line), std::move(circle), std::move(aw), std::move(bz), 0.0);
}

FlatKernel::FlatKernel(Deviation a, double t, const ContourConfig& cfg)
    : a_(a), t_(t), contour_(build_flat_contour(a, cfg)) {
  if (!(t > 0.0) || !std::isfinite(t)) throw invalid_argument("t must be finite and > 0");
  const auto& p = contour_.path;
  amp_.reserve(p.size());
  for (std::size_t j = 0; j < p.size(); ++j)
    amp_.push_back(t_ * phase_flat(p.nodes[j], contour_.phi_nodes[j], a_));
}

Eigen::MatrixXcd FlatKernel::matrix(const std::vector<double>& x1, const std::vector<double>& x2) const {
  const auto& p = contour_.path;
  const auto n = static_cast<Eigen::Index>(p.size());
  Eigen::MatrixXcd u(static_cast<Eigen::Index>(x1.size()), n);
  Eigen::MatrixXcd v(static_cast<Eigen::Index>(x2.size()), n);
  for (std::size_t j = 0; j < p.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const cplx wt = p.weights[j] / two_pi_i;
    for (std::size_t i = 0; i < x1.size(); ++i)
      u(static_cast<Eigen::Index>(i), jj) = std::exp(amp_[j] + x1[i] * (p.nodes[j] + 1.0)) * wt;
    for (std::size_t i = 0; i < x2.size(); ++i)
      v(static_cast<Eigen::Index>(i), jj) = std::exp(-x2[i] * (contour_.phi_nodes[j] + 1.0));
  }
  return u * v.transpose();
}

KernelEval FlatKernel::operator()(double x1, double x2) const {
  return take_real(matrix({x1}, {x2})(0, 0));
}

KernelEval khat_packed(Deviation a, double t, double x1, double x2, const ContourConfig& cfg) {
  const KernelEval coarse = PackedKernel(a, t, cfg)(x1, x2);
  KernelEval fine = PackedKernel(a, t, doubled(cfg))(x1, x2);
  fine.refinement_delta = std::abs(fine.value - coarse.value);
  check_residue(fine, "khat_packed");
  return fine;
}

KernelEval khat_flat(Deviation a, double t, double x1, double x2, const ContourConfig& cfg) {
  const KernelEval coarse = FlatKernel(a, t, cfg)(x1, x2);
  KernelEval fine = FlatKernel(a, t, doubled(cfg))(x1, x2);
  fine.refinement_delta = std::abs(fine.value - coarse.value);
  check_residue(fine, "khat_flat");
  return fine;
}

StationaryKernel::StationaryKernel(Deviation a, double t, const ContourConfig& cfg)
    : a_(a), t_(t), cfg_(cfg), packed_(a, t, cfg) {}

double StationaryKernel::r_hat(double s) const {
  const auto& circ = packed_.circle();
  const Eigen::MatrixXcd v = packed_.circle_factors({s});
  cplx acc = 0.0;
  for (std::size_t l = 0; l < circ.size(); ++l) {
    const cplx zp1 = circ.nodes[l] + 1.0;
    acc += v(0, static_cast<Eigen::Index>(l)) / (zp1 * zp1);
  }
  return (-acc / two_pi_i).real();
}

double StationaryKernel::r_hat_prime(double s) const {
  const auto& circ = packed_.circle();
  const Eigen::MatrixXcd v = packed_.circle_factors({s});
  cplx acc = 0.0;
  for (std::size_t l = 0; l < circ.size(); ++l)
    acc += v(0, static_cast<Eigen::Index>(l)) / (circ.nodes[l] + 1.0);
  return (acc / two_pi_i).real();
}

double StationaryKernel::f_hat(double s) const { return s + a_.value() * t_ + r_hat(s) - 1.0; }

Eigen::VectorXd StationaryKernel::f_star(const std::vector<double>& xi, double s) const {
  const auto& line = packed_.line();
  const auto& circ = packed_.circle();
  const Eigen::MatrixXcd u = packed_.line_factors(xi);
  Eigen::VectorXcd inv_w1(static_cast<Eigen::Index>(line.size()));
  for (std::size_t j = 0; j < line.size(); ++j) inv_w1(static_cast<Eigen::Index>(j)) = 1.0 / (line.nodes[j] + 1.0);
  const Eigen::MatrixXcd vs = packed_.circle_factors({s});
  Eigen::VectorXcd b(static_cast<Eigen::Index>(circ.size()));
  for (std::size_t l = 0; l < circ.size(); ++l)
    b(static_cast<Eigen::Index>(l)) = vs(0, static_cast<Eigen::Index>(l)) / (1.0 + circ.nodes[l]);
  const Eigen::VectorXcd cb = packed_.cauchy() * b;
  const Eigen::VectorXcd out = u * inv_w1 / two_pi_i + u * cb / (two_pi_i * two_pi_i);
  return out.real();
}

Eigen::VectorXd StationaryKernel::g_one(const std::vector<double>& xi) const {
  const auto& circ = packed_.circle();
  const Eigen::MatrixXcd v = packed_.circle_factors(xi);
  Eigen::VectorXcd inv(static_cast<Eigen::Index>(circ.size()));
  for (std::size_t l = 0; l < circ.size(); ++l) inv(static_cast<Eigen::Index>(l)) = 1.0 / (circ.nodes[l] + 1.0);
  const Eigen::VectorXcd out = v * inv / two_pi_i;
  return (out.real().array() + 1.0).matrix();
}

ContourPath StationaryKernel::rho_circle(double rho) const {
  if (!(rho > 0.0 && rho < 1.0)) throw invalid_argument("rho must lie in (0, 1)");
  // Keep the pole at -rho strictly outside; its residue is added explicitly.
  const double r = std::min(std::abs(packed_.circle().nodes[packed_.circle().critical]), rho / 1.2);
  return build_circle(r, packed_.circle().size(), ContourRole::residue_circle);
}

Eigen::VectorXd StationaryKernel::g_rho(const std::vector<double>& xi, double rho) const {
  const ContourPath c = rho_circle(rho);
  const double delta = 1.0 - rho;
  const double h_rho = phase_packed(cplx(-rho, 0.0), a_).real();
  Eigen::VectorXd out(static_cast<Eigen::Index>(xi.size()));
  for (std::size_t i = 0; i < xi.size(); ++i) {
    cplx acc = 0.0;
    for (std::size_t l = 0; l < c.size(); ++l) {
      const cplx z = c.nodes[l];
      acc += std::exp(-t_ * phase_packed(z, a_) - xi[i] * (z + 1.0)) * c.weights[l] / (z + rho);
    }
    out(static_cast<Eigen::Index>(i)) = (acc / two_pi_i).real() + std::exp(-t_ * h_rho - xi[i] * delta);
  }
  return out;
}

double StationaryKernel::projected_one_g(double s, double rho) const {
  const ContourPath c = rho_circle(rho);
  const double delta = 1.0 - rho;
  const double h_rho = phase_packed(cplx(-rho, 0.0), a_).real();
  cplx acc = 0.0;
  for (std::size_t l = 0; l < c.size(); ++l) {
    const cplx z = c.nodes[l];
    acc += std::exp(-t_ * phase_packed(z, a_) - s * (z + 1.0)) * c.weights[l] / ((z + rho) * (z + 1.0));
  }
  return std::exp(-t_ * h_rho - s * delta) + delta * (acc / two_pi_i).real();
}

StatComponents stat_components(Deviation a, double t, double s_offset, const ContourConfig& cfg) {
  auto k = std::make_shared<StationaryKernel>(a, t, cfg);
  StatComponents c;
  c.r_hat = k->r_hat(s_offset);
  c.r_hat_prime = k->r_hat_prime(s_offset);
  c.f_hat_t = k->f_hat(s_offset);
  c.f_star = [k, s_offset](double xi) { return k->f_star({xi}, s_offset)(0); };
  c.g_one = [k](double xi) { return k->g_one({xi})(0); };
  return c;
}

std::function<double(double, double)> klimit(InitialCondition ic, Deviation a) {
  if (ic == InitialCondition::packed) {
    const auto d = saddle_packed(a);
    const double wm = d.saddle_lo, wp = d.saddle_hi;
    const double c = -1.0 / (2.0 * pi * std::sqrt(-d.second_hi * d.second_lo) * (wm - wp));
    return [=](double x1, double x2) { return c * std::exp(x1 * (wm + 1.0) - x2 * (wp + 1.0)); };
  }
  if (ic == InitialCondition::flat) {
    const auto d = rate_flat(a);
    const double za = d.saddle_lo, f = d.saddle_hi;
    const double c = std::sqrt(2.0 * pi / -d.eta) * za / (1.0 + za);
    return [=](double x1, double x2) { return c * std::exp(x1 * (za + 1.0) - x2 * (f + 1.0)); };
  }
  throw invalid_argument("klimit: only packed and flat limits exist");
}

double limit_prefactor(InitialCondition ic, Deviation a) {
  if (ic == InitialCondition::packed) {
    const auto d = saddle_packed(a);
    const double gap = d.saddle_lo - d.saddle_hi;
    return 1.0 / (2.0 * pi * std::sqrt(-d.second_hi * d.second_lo) * gap * gap);
  }
  return quoted_prefactor(ic, a);
}

double quoted_prefactor(InitialCondition ic, Deviation a) {
  if (ic == InitialCondition::packed) {
    const auto d = saddle_packed(a);
    const double wm = d.saddle_lo, wp = d.saddle_hi;
    return 2.0 * pi * wm * wp / ((wm - wp) * (wm - wp) * std::sqrt((wm * wm - 1.0) * (1.0 - wp * wp)));
  }
  if (ic == InitialCondition::flat) {
    const auto d = rate_flat(a);
    const double za = d.saddle_lo, f = d.saddle_hi;
    return std::sqrt(2.0 * pi / -d.eta) * za / ((1.0 + za) * (f - za));
  }
  throw invalid_argument("no prefactor for the stationary case");
}

}  // namespace rbmld
