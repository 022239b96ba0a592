#include "rbmld/fredholm.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "rbmld/kernel.hpp"

namespace rbmld {

namespace {

Eigen::MatrixXd weighted(const Eigen::MatrixXd& k, const QuadGrid& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::VectorXd sw(n);
  for (Eigen::Index i = 0; i < n; ++i) sw(i) = std::sqrt(g.weights[static_cast<std::size_t>(i)]);
  return sw.asDiagonal() * k * sw.asDiagonal();
}

double max_imag(const Eigen::MatrixXcd& m) { return m.imag().cwiseAbs().maxCoeff(); }

ContourConfig scaled(ContourConfig cfg, int factor) {
  cfg.points_per_unit *= factor;
  return cfg;
}

double richardson(const std::function<double(double)>& d, double h, const char* who) {
  const double d1 = (d(h) - d(-h)) / (2.0 * h);
  const double d2 = (d(2.0 * h) - d(-2.0 * h)) / (4.0 * h);
  const double r = (4.0 * d1 - d2) / 3.0;
  if (std::abs(r - d1) > 1e-5)
    throw numeric_failure(std::string(who) + ": finite-difference derivative unstable in h", r, std::abs(r - d1));
  return r;
}

// Accept p slightly outside [0, 1] with a warning, fail otherwise.
double clamp_probability(double p, const char* who) {
  if (p >= 0.0 && p <= 1.0) return p;
  if (p >= -1e-9 && p <= 1.0 + 1e-9) {
    spdlog::warn("{}: probability {:.3e} clamped to [0, 1]", who, p);
    return std::clamp(p, 0.0, 1.0);
  }
  throw numeric_failure(std::string(who) + ": probability outside [0, 1]", p, p);
}

struct Sample {
  double p;
  double survival;
  double im;
  QuadGrid grid;
};

ProbResult finish(const Sample& fine, const Sample* coarse, const char* who) {
  ProbResult r;
  r.p = clamp_probability(fine.p, who);
  r.log_survival = fine.survival > 0.0 ? std::log(fine.survival) : -HUGE_VAL;
  r.im_residue = fine.im;
  r.refinement_delta = coarse ? std::abs(fine.p - coarse->p) : 0.0;
  r.grid = fine.grid;
  if (coarse && r.refinement_delta > 1e-9)
    spdlog::warn("{}: refinement changed p by {:.3e}", who, r.refinement_delta);
  return r;
}

template <class Eval>
ProbResult refined(const FredholmOptions& opt, Eval eval, const char* who) {
  opt.contour.validate();
  if (opt.grid_size < 8) throw invalid_argument("grid_size must be >= 8");
  const Sample first = eval(opt.contour, opt.grid_size);
  if (!opt.refine) return finish(first, nullptr, who);
  const Sample second = eval(scaled(opt.contour, 2), 2 * opt.grid_size);
  return finish(second, &first, who);
}

void check_t(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw invalid_argument("t must be finite and > 0");
}

}  // namespace

DetResult fredholm_det(const Eigen::MatrixXd& kernel, const QuadGrid& grid) {
  if (kernel.rows() != static_cast<Eigen::Index>(grid.size()) || kernel.cols() != kernel.rows())
    throw invalid_argument("fredholm_det: kernel matrix does not match grid");
  const Eigen::MatrixXd a = weighted(kernel, grid);
  if (!a.allFinite()) throw numeric_failure("fredholm_det: non-finite kernel entries");
  if (a.norm() < 0.3) {
    // log det(I - A) = -sum tr(A^k)/k; keeps 1 - det accurate deep in the tail.
    Eigen::MatrixXd pw = a;
    double logdet = 0.0;
    for (int k = 1; k <= 400; ++k) {
      const double term = pw.trace() / k;
      logdet -= term;
      if (std::abs(term) <= 1e-18 * std::abs(logdet) || pw.norm() < 1e-300) break;
      pw = pw * a;
    }
    return {std::exp(logdet), -std::expm1(logdet)};
  }
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(a.rows(), a.cols()) - a;
  const double det = m.partialPivLu().determinant();
  return {det, 1.0 - det};
}

double nystrom_det(const std::function<double(double, double)>& kernel, const QuadGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      k(i, j) = kernel(grid.nodes[static_cast<std::size_t>(i)], grid.nodes[static_cast<std::size_t>(j)]);
  return fredholm_det(k, grid).det;
}

ProbResult prob_packed(double t, Deviation a, const FredholmOptions& opt) {
  check_t(t);
  auto eval = [&](const ContourConfig& cfg, std::size_t g) {
    const PackedKernel k(a, t, cfg);
    QuadGrid grid = make_exp_grid(opt.s_offset, a.value(), g);
    const Eigen::MatrixXcd km = k.matrix(grid.nodes, grid.nodes);
    const DetResult d = fredholm_det(km.real(), grid);
    return Sample{d.det, d.one_minus_det, max_imag(km), std::move(grid)};
  };
  return refined(opt, eval, "prob_packed");
}

ProbResult prob_flat(double t, Deviation a, const FredholmOptions& opt) {
  check_t(t);
  const double decay = std::abs(solve_za(a) + 1.0);
  auto eval = [&](const ContourConfig& cfg, std::size_t g) {
    const FlatKernel k(a, t, cfg);
    QuadGrid grid = make_exp_grid(opt.s_offset, decay, g);
    const Eigen::MatrixXcd km = k.matrix(grid.nodes, grid.nodes);
    const DetResult d = fredholm_det(km.real(), grid);
    return Sample{d.det, d.one_minus_det, max_imag(km), std::move(grid)};
  };
  return refined(opt, eval, "prob_flat");
}

namespace {

struct StatDet {
  double first;   // F(s) det(I - K_s)
  double second;  // det(I - (K + f* g1)_s)
  double im;
  QuadGrid grid;
};

StatDet stat_dets(const StationaryKernel& k, Deviation a, double s, std::size_t g) {
  StatDet out;
  out.grid = make_exp_grid(s, a.value(), g);
  const Eigen::MatrixXcd km = k.packed().matrix(out.grid.nodes, out.grid.nodes);
  out.im = max_imag(km);
  const Eigen::MatrixXd kr = km.real();
  const Eigen::VectorXd fs = k.f_star(out.grid.nodes, s);
  const Eigen::VectorXd g1 = k.g_one(out.grid.nodes);
  out.first = k.f_hat(s) * fredholm_det(kr, out.grid).det;
  out.second = fredholm_det(kr + fs * g1.transpose(), out.grid).det;
  return out;
}

double default_step(double t, Deviation a, double h) { return h > 0.0 ? h : 1e-3 * (1.0 + a.value() * t); }

}  // namespace

ProbResult prob_stat(double t, Deviation a, double h, const FredholmOptions& opt) {
  check_t(t);
  if (!std::isfinite(h)) throw invalid_argument("finite-difference step must be finite");
  const double step = default_step(t, a, h);
  auto eval = [&](const ContourConfig& cfg, std::size_t g) {
    const StationaryKernel k(a, t, cfg);
    double im = 0.0;
    auto d = [&](double ds) {
      const StatDet sd = stat_dets(k, a, opt.s_offset + ds, g);
      im = std::max(im, sd.im);
      return sd.first + sd.second;
    };
    const double p = richardson(d, step, "prob_stat");
    return Sample{p, 1.0 - p, im, make_exp_grid(opt.s_offset, a.value(), g)};
  };
  return refined(opt, eval, "prob_stat");
}

StatSummands stat_summand_derivatives(double t, Deviation a, const FredholmOptions& opt) {
  check_t(t);
  const double h = default_step(t, a, 0.0);
  const StationaryKernel k(a, t, opt.contour);
  const StatDet up = stat_dets(k, a, opt.s_offset + h, opt.grid_size);
  const StatDet dn = stat_dets(k, a, opt.s_offset - h, opt.grid_size);
  return {(up.first - dn.first) / (2.0 * h), (up.second - dn.second) / (2.0 * h)};
}

ProbResult prob_stat_rho(double t, Deviation a, double rho, const FredholmOptions& opt) {
  check_t(t);
  if (!(rho > 0.0 && rho < 1.0)) throw invalid_argument("rho must lie in (0, 1); use prob_stat for rho = 1");
  const double delta = 1.0 - rho;
  const double step = default_step(t, a, 0.0);
  auto eval = [&](const ContourConfig& cfg, std::size_t g) {
    const StationaryKernel k(a, t, cfg);
    double im = 0.0;
    auto d = [&](double ds) {
      const double s = opt.s_offset + ds;
      const QuadGrid grid = make_exp_grid(s, a.value(), g);
      const Eigen::MatrixXcd km = k.packed().matrix(grid.nodes, grid.nodes);
      im = std::max(im, max_imag(km));
      const Eigen::MatrixXd kr = km.real();
      const Eigen::VectorXd fs = k.f_star(grid.nodes, s);
      const Eigen::VectorXd gr = k.g_rho(grid.nodes, rho);
      const auto n = static_cast<Eigen::Index>(grid.size());
      const Eigen::Map<const Eigen::VectorXd> w(grid.weights.data(), n);
      const Eigen::MatrixXd ikw = Eigen::MatrixXd::Identity(n, n) - kr * w.asDiagonal();
      const Eigen::VectorXd hs = ikw.partialPivLu().solve(fs);
      const double inner = (w.array() * hs.array() * gr.array()).sum();
      return fredholm_det(kr, grid).det * (1.0 - k.projected_one_g(s, rho) - delta * inner);
    };
    const double p = d(0.0) + richardson(d, step, "prob_stat_rho") / delta;
    return Sample{p, 1.0 - p, im, make_exp_grid(opt.s_offset, a.value(), g)};
  };
  return refined(opt, eval, "prob_stat_rho");
}

ProbResult prob_packed_level(int n, double t, double s, const FredholmOptions& opt) {
  check_t(t);
  if (n < 0) throw invalid_argument("particle index must be >= 0");
  if (!std::isfinite(s)) throw invalid_argument("level must be finite");
  const double hi = std::max(s, 2.0 * std::sqrt(n * t)) + 12.0 * std::sqrt(t) + 2.0;
  const double xi_max = std::max(std::abs(s), std::abs(hi));
  auto eval = [&](const ContourConfig& cfg, std::size_t g) {
    QuadGrid grid = make_finite_grid(s, hi, g);
    if (n == 0) return Sample{1.0, 0.0, 0.0, std::move(grid)};
    const RawPackedKernel k(n, t, s, xi_max, cfg);
    const Eigen::MatrixXcd km = k.matrix(grid.nodes, grid.nodes);
    const DetResult d = fredholm_det(km.real(), grid);
    return Sample{d.det, d.one_minus_det, max_imag(km), std::move(grid)};
  };
  FredholmOptions o = opt;
  o.grid_size = std::max<std::size_t>(opt.grid_size, 64);
  return refined(o, eval, "prob_packed_level");
}

std::vector<TailRow> tail_rate_table(InitialCondition ic, Deviation a, const std::vector<double>& ts,
                                     const FredholmOptions& opt) {
  if (ts.empty()) throw invalid_argument("tail_rate_table: empty t list");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    check_t(ts[i]);
    if (i > 0 && !(ts[i] > ts[i - 1])) throw invalid_argument("tail_rate_table: t list must increase");
  }
  double r = 0.0;
  switch (ic) {
    case InitialCondition::packed: r = rate_packed(a); break;
    case InitialCondition::flat: r = rate_flat(a).rate; break;
    case InitialCondition::stationary: r = rate_stat(a); break;
  }
  std::vector<TailRow> rows;
  for (double t : ts) {
    ProbResult pr{};
    double power = 0.0;  // survival ~ C t^{-power} e^{-tr}
    switch (ic) {
      case InitialCondition::packed: pr = prob_packed(t, a, opt); power = 1.0; break;
      case InitialCondition::flat: pr = prob_flat(t, a, opt); power = 0.5; break;
      case InitialCondition::stationary: pr = prob_stat(t, a, 0.0, opt); break;
    }
    TailRow row;
    row.t = t;
    row.log_survival = pr.log_survival;
    row.r_hat = -pr.log_survival / t;
    row.r_theory = r;
    row.scaled_prefactor = std::exp(pr.log_survival + t * r + power * std::log(t));
    row.predicted_log_survival = ic == InitialCondition::stationary
                                     ? -t * r
                                     : std::log(limit_prefactor(ic, a)) - t * r - power * std::log(t);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rbmld
