#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "rbmld/contour.hpp"
#include "rbmld/quadrature.hpp"
#include "rbmld/saddle.hpp"

namespace rbmld {

// det(I - W^{1/2} K W^{1/2}) with 1 - det kept to full relative accuracy
// when the operator is small (trace series), LU otherwise.
struct DetResult {
  double det;
  double one_minus_det;
};
DetResult fredholm_det(const Eigen::MatrixXd& kernel, const QuadGrid& grid);
double nystrom_det(const std::function<double(double, double)>& kernel, const QuadGrid& grid);

struct FredholmOptions {
  ContourConfig contour{};
  std::size_t grid_size = 48;
  double s_offset = 0.0;   // shift of the level away from 2t + at
  bool refine = true;      // redo at doubled nodes and grid, report the change
};

struct ProbResult {
  double p;
  double log_survival;
  double im_residue;
  double refinement_delta;
  QuadGrid grid;
};

// P(x_t(t) <= 2t + at + s_offset) for the three initial conditions.
ProbResult prob_packed(double t, Deviation a, const FredholmOptions& opt = {});
ProbResult prob_flat(double t, Deviation a, const FredholmOptions& opt = {});
// rho = 1, by differentiating the continued determinant in s with step h
// (h <= 0 picks 1e-3 (1 + a t)).
ProbResult prob_stat(double t, Deviation a, double h = 0.0, const FredholmOptions& opt = {});
ProbResult prob_stat_rho(double t, Deviation a, double rho, const FredholmOptions& opt = {});

// P(x_n(t) <= s) for the packed system with integer n (unscaled kernel,
// finite Gauss-Legendre grid).  n = 1 is the free lowest particle.
ProbResult prob_packed_level(int n, double t, double s, const FredholmOptions& opt = {});

// s-derivatives of the two summands of the rho = 1 expression at offset s.
struct StatSummands {
  double first;
  double second;
};
StatSummands stat_summand_derivatives(double t, Deviation a, const FredholmOptions& opt = {});

struct TailRow {
  double t;
  double log_survival;
  double r_hat;
  double r_theory;
  double scaled_prefactor;   // t e^{tr} P (packed), sqrt(t) e^{tr} P (flat), e^{tr} P (stationary)
  double predicted_log_survival;
};
std::vector<TailRow> tail_rate_table(InitialCondition ic, Deviation a, const std::vector<double>& ts,
                                     const FredholmOptions& opt = {});

}  // namespace rbmld
