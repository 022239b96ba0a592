#pragma once

#include <cstddef>
#include <vector>

namespace rbmld {

struct GaussLegendre {
  std::vector<double> nodes;    // on (-1, 1), increasing
  std::vector<double> weights;
};

// Golub-Welsch on the Jacobi matrix.
GaussLegendre gauss_legendre(std::size_t n);

enum class GridMap { exp_decay, finite };

// Nodes in (lower, inf) (exp_decay) or (lower, upper) (finite).
struct QuadGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
  GridMap map = GridMap::exp_decay;
  double decay_rate = 0.0;
  double lower = 0.0;
  double upper = 0.0;

  std::size_t size() const { return nodes.size(); }
};

// xi = s - log(1 - u) / d with Gauss-Legendre nodes u in (0, 1).
QuadGrid make_exp_grid(double s, double decay_rate, std::size_t size);
QuadGrid make_finite_grid(double lo, double hi, std::size_t size);

}  // namespace rbmld
