#include "rbmld/lambert.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace rbmld {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double e_const = std::numbers::e;
const double inv_e = std::exp(-1.0);
constexpr int max_iter = 100;

// -1 + p - p^2/3 + 11 p^3/72 with p = sqrt(2(ez+1)); sign = -1 gives the
// neighbouring branch that meets W_0 at -1/e.
cplx branch_point_series(cplx z, double sign) {
  const cplx p = sign * std::sqrt(2.0 * (e_const * z + 1.0));
  return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)));
}

// (3,2) Pade approximant of W_0 about the origin.
cplx pade0(cplx z) {
  const cplx num = 1.0 + z * (1.9 + z * (17.0 / 60.0));
  const cplx den = 1.0 + z * (2.9 + z * (101.0 / 60.0));
  return z * num / den;
}

cplx asymptotic(cplx z, int k) {
  const cplx l1 = std::log(z) + cplx(0.0, 2.0 * pi * k);
  return l1 - std::log(l1);
}

cplx initial_guess(int k, cplx z) {
  const double d = std::abs(z + inv_e);
  if (k == 0) {
    if (d < 0.3) return branch_point_series(z, 1.0);
    if (z.real() > -1.0 && z.real() < 1.5 && std::abs(z.imag()) < 1.0 &&
        z.real() > -2.5 * std::abs(z.imag()) - 0.2)
      return pade0(z);
    return asymptotic(z, 0);
  }
  const bool upper = z.imag() >= 0.0;
  if (d < 0.3 && ((k == -1 && upper) || (k == 1 && !upper))) return branch_point_series(z, -1.0);
  return asymptotic(z, k);
}

cplx halley(cplx z, cplx w) {
  for (int it = 0; it < max_iter; ++it) {
    cplx wn;
    if (w.real() >= 0.0) {
      const cplx ew = std::exp(-w);
      const cplx f = w - z * ew;
      wn = w - f / (w + 1.0 - (w + 2.0) * f / (2.0 * w + 2.0));
    } else {
      const cplx ew = std::exp(w);
      const cplx wew = w * ew;
      const cplx f = wew - z;
      wn = w - f / (wew + ew - (w + 2.0) * f / (2.0 * w + 2.0));
    }
    if (!std::isfinite(wn.real()) || !std::isfinite(wn.imag())) return w;
    if (std::abs(wn - w) <= 1e-15 * std::abs(wn)) return wn;
    w = wn;
  }
  return w;
}

// Strip of Im W_k; open at the ends that lie on a cut image.
bool in_strip(int k, cplx w) {
  const double im = w.imag();
  if (k == 0) return im > -pi && im <= pi;
  if (k >= 1) return im > (2.0 * k - 2.0) * pi && im < (2.0 * k + 1.0) * pi;
  return im > (2.0 * k - 1.0) * pi && im < (2.0 * k + 2.0) * pi;
}

// w + Log w = Log z + 2 pi i k off the cuts; used to reject convergence to a
// neighbouring branch.
bool on_branch(int k, cplx z, cplx w) {
  const cplx gap = w + std::log(w) - std::log(z);
  const double m = std::round(gap.imag() / (2.0 * pi));
  return static_cast<int>(m) == k && in_strip(k, w);
}

double residual(cplx z, cplx w) { return std::abs(w * std::exp(w) - z); }

}  // namespace

cplx lambert_w(int k, cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw invalid_argument("lambert_w: non-finite argument");
  if (z.imag() == 0.0) z = cplx(z.real(), 0.0);  // -0 imag means "from above" too
  if (z == cplx(0.0)) {
    if (k == 0) return 0.0;
    throw invalid_argument("lambert_w: W_k(0) is -infinity for k != 0");
  }
  if ((k == 0 || k == -1) && std::abs(z + inv_e) < 1e-12) return -1.0;

  const bool real_branch = z.imag() == 0.0 &&
                           ((k == 0 && z.real() >= -inv_e) ||
                            (k == -1 && z.real() >= -inv_e && z.real() < 0.0));
  const double tol = 1e-12 * (1.0 + std::abs(z));

  cplx w = halley(z, initial_guess(k, z));
  if (real_branch) w = halley(z, cplx(w.real(), 0.0));
  if (!real_branch && !on_branch(k, z, w)) {
    // Seed landed in a neighbouring basin; retry from the other seeds.
    for (cplx seed : {asymptotic(z, k), branch_point_series(z, k == 0 ? 1.0 : -1.0)}) {
      cplx v = halley(z, seed);
      if (on_branch(k, z, v) && residual(z, v) <= tol) {
        w = v;
        break;
      }
    }
  }
  const double res = residual(z, w);
  if (!(res <= tol))
    throw numeric_failure("lambert_w: no convergence on branch " + std::to_string(k), w, res);
  return w;
}

double phi(double z) {
  if (!std::isfinite(z)) throw invalid_argument("phi: non-finite argument");
  if (z >= -1.0) return z;
  // Other root of w + log(-w) = c, c = z + log(-z), written in u = log(-w):
  // F(u) = u - e^u - c is increasing and concave on u < 0, so Newton from the
  // left bound u = c is monotone.  The bracket [c, min(c+1, 0)] backs it up.
  const double c = z + std::log(-z);
  double lo = c;
  double hi = std::min(c + 1.0, 0.0);
  double u = lo;
  for (int it = 0; it < 200; ++it) {
    const double eu = std::exp(u);
    const double f = u - eu - c;
    if (f < 0.0) lo = u; else hi = u;
    const double fp = 1.0 - eu;
    double un = u - f / fp;
    if (!(un > lo && un < hi)) un = 0.5 * (lo + hi);
    if (std::abs(un - u) <= 1e-16 * std::max(1.0, std::abs(un)) || hi - lo <= 1e-16 * std::abs(lo)) {
      u = un;
      break;
    }
    u = un;
  }
  return -std::exp(u);
}

cplx phi(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw invalid_argument("phi: non-finite argument");
  if (z.imag() == 0.0) return phi(z.real());
  return lambert_w(0, z * std::exp(z));
}

cplx phi_prime(cplx z) {
  if (std::abs(z + 1.0) == 0.0) throw singularity_error("phi_prime: branch point z = -1");
  if (std::abs(z) == 0.0) throw singularity_error("phi_prime: z = 0");
  const cplx f = phi(z);
  return (1.0 + z) * f / (z * (1.0 + f));
}

double phi_prime(double z) { return phi_prime(cplx(z, 0.0)).real(); }

}  // namespace rbmld
