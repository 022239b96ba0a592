#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "rbmld/contour.hpp"
#include "rbmld/saddle.hpp"

namespace rbmld {

struct KernelEval {
  double value;
  double im_residue;
  double refinement_delta;
};

// Largest |imaginary part| tolerated before an evaluation is rejected.
bool acceptable_residue(double value, double im_residue);

// Double-contour kernel
//   K(x1, x2) = (2 pi i)^{-2} sum_j sum_l e^{A_j + x1 (w_j + c)} dw_j / (w_j - z_l) e^{B_l - x2 (z_l + c)} dz_l
// on a line and a circle.  Shared engine for the scaled packed kernel (c = 1)
// and the raw integer-n kernel (c = 0).
class DoubleContourKernel {
 public:
  Eigen::MatrixXcd matrix(const std::vector<double>& x1, const std::vector<double>& x2) const;
  KernelEval operator()(double x1, double x2) const;

  const ContourPath& line() const { return line_; }
  const ContourPath& circle() const { return circle_; }
  // e^{A_j + x (w_j + shift)} * weight, one row per x.
  Eigen::MatrixXcd line_factors(const std::vector<double>& x) const;
  // e^{B_l - x (z_l + shift)} * weight, one row per x.
  Eigen::MatrixXcd circle_factors(const std::vector<double>& x) const;
  const Eigen::MatrixXcd& cauchy() const { return cauchy_; }

 protected:
  DoubleContourKernel() = default;
  void assemble(ContourPath line, ContourPath circle, std::vector<cplx> log_amp_w,
                std::vector<cplx> log_amp_z, double shift);

 private:
  ContourPath line_{};
  ContourPath circle_{};
  std::vector<cplx> aw_;
  std::vector<cplx> bz_;
  double shift_ = 0.0;
  Eigen::MatrixXcd cauchy_;
};

// Conjugated packed kernel at n = t, level 2t + at:
//   (2 pi i)^{-2} int_{gamma_-} dw int_{gamma_+} dz e^{t(H(w)-H(z))} e^{x1(w+1) - x2(z+1)} / (w - z).
class PackedKernel : public DoubleContourKernel {
 public:
  PackedKernel(Deviation a, double t, const ContourConfig& cfg = {}, double radius_scale = 1.0);
  Deviation deviation() const { return a_; }
  double time() const { return t_; }

 private:
  Deviation a_;
  double t_;
};

// Unscaled packed kernel for integer n >= 0 at time t, with the contours
// placed at the saddles of t w^2/2 + level w + n log(-w).  Variables are the
// raw positions (no shift); xi_max bounds |xi| for the circle resolution.
class RawPackedKernel : public DoubleContourKernel {
 public:
  RawPackedKernel(int n, double t, double level, double xi_max, const ContourConfig& cfg = {});
};

// Flat kernel: sum_tau h e^{t G(gamma)} gamma/(1+gamma) e^{x1(gamma+1) - x2(phi(gamma)+1)}.
class FlatKernel {
 public:
  FlatKernel(Deviation a, double t, const ContourConfig& cfg = {});

  Eigen::MatrixXcd matrix(const std::vector<double>& x1, const std::vector<double>& x2) const;
  KernelEval operator()(double x1, double x2) const;
  const FlatContour& contour() const { return contour_; }
  Deviation deviation() const { return a_; }

 private:
  Deviation a_;
  double t_;
  FlatContour contour_;
  std::vector<cplx> amp_;
};

KernelEval khat_packed(Deviation a, double t, double x1, double x2, const ContourConfig& cfg = {});
KernelEval khat_flat(Deviation a, double t, double x1, double x2, const ContourConfig& cfg = {});

// Pieces of the rho = 1 (and rho < 1) stationary formula, all on the packed
// contours.  s is the offset from the level 2t + at.
class StationaryKernel {
 public:
  StationaryKernel(Deviation a, double t, const ContourConfig& cfg = {});

  const PackedKernel& packed() const { return packed_; }
  double r_hat(double s) const;
  double r_hat_prime(double s) const;
  double f_hat(double s) const;
  Eigen::VectorXd f_star(const std::vector<double>& xi, double s) const;
  Eigen::VectorXd g_one(const std::vector<double>& xi) const;
  // g_rho including the residue at z = -rho, and (1-rho) <P_s 1, P_s g_rho>.
  Eigen::VectorXd g_rho(const std::vector<double>& xi, double rho) const;
  double projected_one_g(double s, double rho) const;

 private:
  ContourPath rho_circle(double rho) const;
  Deviation a_;
  double t_;
  ContourConfig cfg_;
  PackedKernel packed_;
};

struct StatComponents {
  double r_hat;
  double r_hat_prime;
  double f_hat_t;
  std::function<double(double)> f_star;
  std::function<double(double)> g_one;
};
StatComponents stat_components(Deviation a, double t, double s_offset, const ContourConfig& cfg = {});

// t -> infinity limit kernels, saddle-point normalised so that
//   t e^{t r} K_t -> K_inf (packed),  sqrt(t) e^{t r} K_t -> K_inf (flat).
std::function<double(double, double)> klimit(InitialCondition ic, Deviation a);
// Integral of K_inf(xi, xi) over (0, inf): the survival prefactor.
double limit_prefactor(InitialCondition ic, Deviation a);
// The closed-form prefactor constants as usually quoted; for packed these
// carry an extra factor (2 pi)^2 relative to limit_prefactor.
double quoted_prefactor(InitialCondition ic, Deviation a);

}  // namespace rbmld
