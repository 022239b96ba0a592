#include "rbmld/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "rbmld/errors.hpp"

namespace rbmld {

GaussLegendre gauss_legendre(std::size_t n) {
  if (n == 0) throw invalid_argument("gauss_legendre: n must be positive");
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index k = 1; k < m; ++k) {
    const double kk = static_cast<double>(k);
    const double b = kk / std::sqrt(4.0 * kk * kk - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double v = es.eigenvectors()(0, k);
    gl.nodes[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
    gl.weights[static_cast<std::size_t>(k)] = 2.0 * v * v;
  }
  // Symmetrise: the eigen-solver leaves ~1e-16 asymmetry.
  for (std::size_t i = 0, j = n - 1; i < j; ++i, --j) {
    const double x = 0.5 * (gl.nodes[j] - gl.nodes[i]);
    const double w = 0.5 * (gl.weights[i] + gl.weights[j]);
    gl.nodes[i] = -x;
    gl.nodes[j] = x;
    gl.weights[i] = gl.weights[j] = w;
  }
  if (n % 2 == 1) gl.nodes[n / 2] = 0.0;
  return gl;
}

QuadGrid make_exp_grid(double s, double decay_rate, std::size_t size) {
  if (size < 8) throw invalid_argument("quadrature grid needs at least 8 nodes");
  if (!(decay_rate > 0.0)) throw invalid_argument("decay rate must be > 0");
  const auto gl = gauss_legendre(size);
  QuadGrid g;
  g.map = GridMap::exp_decay;
  g.decay_rate = decay_rate;
  g.lower = s;
  g.upper = HUGE_VAL;
  for (std::size_t i = 0; i < size; ++i) {
    const double om = 0.5 * (1.0 - gl.nodes[i]);  // 1 - u without cancellation
    g.nodes.push_back(s - std::log(om) / decay_rate);
    g.weights.push_back(0.5 * gl.weights[i] / (decay_rate * om));
  }
  return g;
}

QuadGrid make_finite_grid(double lo, double hi, std::size_t size) {
  if (size < 8) throw invalid_argument("quadrature grid needs at least 8 nodes");
  if (!(hi > lo)) throw invalid_argument("finite grid needs hi > lo");
  const auto gl = gauss_legendre(size);
  QuadGrid g;
  g.map = GridMap::finite;
  g.lower = lo;
  g.upper = hi;
  const double half = 0.5 * (hi - lo);
  for (std::size_t i = 0; i < size; ++i) {
    g.nodes.push_back(lo + half * (gl.nodes[i] + 1.0));
    g.weights.push_back(half * gl.weights[i]);
  }
  return g;
}

}  // namespace rbmld
