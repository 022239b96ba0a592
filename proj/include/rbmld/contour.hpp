#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "rbmld/errors.hpp"
#include "rbmld/saddle.hpp"

namespace rbmld {

enum class ContourRole { w_line, z_circle, lambert_gamma, residue_circle };

struct ContourConfig {
  int points_per_unit = 64;
  double truncation_tol = 1e-16;
  double tau_max = 4.0;

  void validate() const;
};

// Discretised path.  weights[j] = (parameter step) * d(node)/d(param), so
// sum_j f(nodes[j]) weights[j] approximates the contour integral of f.
struct ContourPath {
  ContourRole role;
  std::vector<double> params;
  std::vector<cplx> nodes;
  std::vector<cplx> tangents;
  std::vector<cplx> weights;
  double param_lo = 0.0;
  double param_hi = 0.0;
  bool closed = false;
  std::size_t critical = 0;  // node at parameter 0

  std::size_t size() const { return nodes.size(); }
};

// Counterclockwise circle z = -r e^{i theta}, theta in (-pi, pi), odd node
// count so theta = 0 (the point -r) is a node and +r is never hit.
ContourPath build_circle(double radius, std::size_t count, ContourRole role);

// Vertical line w = x + i y, |y| <= half_height, spacing h, upward.
ContourPath build_vertical_line(double x, double half_height, double h);

// gamma_- through w_- (truncated where |e^{tH}| drops below tol relative to
// the saddle) and gamma_+ = circle of radius radius_scale * |w_+|.
std::pair<ContourPath, ContourPath> build_packed_contours(Deviation a, double t,
                                                          const ContourConfig& cfg,
                                                          double radius_scale = 1.0);

// Node count used for the circles at this (a, t).
std::size_t circle_node_count(Deviation a, double t, const ContourConfig& cfg);

// gamma(tau) solving w + log w = z_a + log|z_a| + i pi (1 + 2 tau), built by
// continuation from gamma(0) = z_a; also returns phi on the contour in
// `phi_nodes` via the companion map.
struct FlatContour {
  ContourPath path;
  std::vector<cplx> phi_nodes;
  double z_a;
  double step;  // tau spacing
};
FlatContour build_flat_contour(Deviation a, const ContourConfig& cfg);

struct SteepDescentReport {
  double max_interior;
  double max_exterior;
  double epsilon;
  bool ok() const { return epsilon > 0.0; }
};

// epsilon = phase(critical) - max{phase(j) : |param_j| >= delta}.
SteepDescentReport steep_descent_report(const ContourPath& path,
                                        const std::function<double(std::size_t)>& phase,
                                        double delta);

}  // namespace rbmld
