#include "rbmld/saddle.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rbmld/lambert.hpp"

namespace rbmld {

std::string_view to_string(InitialCondition ic) {
  switch (ic) {
    case InitialCondition::packed: return "packed";
    case InitialCondition::flat: return "flat";
    case InitialCondition::stationary: return "stationary";
  }
  return "?";
}

InitialCondition parse_initial_condition(std::string_view name) {
  if (name == "packed") return InitialCondition::packed;
  if (name == "flat") return InitialCondition::flat;
  if (name == "stationary" || name == "stat") return InitialCondition::stationary;
  throw invalid_argument("unknown initial condition '" + std::string(name) + "'");
}

Deviation::Deviation(double a) : a_(a) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw invalid_argument("deviation a must be finite and > 0, got " + std::to_string(a));
}

cplx phase_packed(cplx w, Deviation a) {
  if (w.imag() == 0.0 && w.real() >= 0.0)
    throw invalid_argument("phase_packed: w on the cut [0, inf)");
  const double av = a.value();
  return (w * w - 1.0) / 2.0 + (2.0 + av) * (w + 1.0) + std::log(-w);
}

cplx phase_packed_d1(cplx w, Deviation a) { return w + 2.0 + a.value() + 1.0 / w; }

cplx phase_packed_d2(cplx w) { return 1.0 - 1.0 / (w * w); }

namespace {

// sqrt(a + a^2/4)
double disc(double a) { return std::sqrt(a + a * a / 4.0); }

}  // namespace

SaddleDiagnostics saddle_packed(Deviation a) {
  const double av = a.value();
  const double s = disc(av);
  // w_+ = -1 - a/2 + s loses digits for small a; use w_+ = 1 / w_-.
  const double wm = -1.0 - av / 2.0 - s;
  const double wp = 1.0 / wm;
  SaddleDiagnostics d{};
  d.ic = InitialCondition::packed;
  d.a = av;
  d.saddle_lo = wm;
  d.saddle_hi = wp;
  d.phase_lo = phase_packed(wm, a).real();
  d.phase_hi = phase_packed(wp, a).real();
  d.second_lo = phase_packed_d2(wm).real();
  d.second_hi = phase_packed_d2(wp).real();
  d.eta = std::nan("");
  d.rate = rate_packed(a);
  return d;
}

double rate_packed(Deviation a) {
  const double av = a.value();
  const double s = disc(av);
  return (2.0 + av) * s + 2.0 * std::log1p(av / 2.0 - s);
}

double rate_stat(Deviation a) {
  const double av = a.value();
  const double s = disc(av);
  return -av * av / 4.0 + (1.0 + av / 2.0) * s + std::log1p(av / 2.0 - s);
}

double phase_flat(double z, Deviation a) {
  if (!(z < -1.0)) throw invalid_argument("phase_flat: requires z < -1");
  const double f = phi(z);
  return (z - f) * ((z + f) / 2.0 + 1.0 + a.value());
}

double phase_flat_d1(double z, Deviation a) {
  if (!(z < -1.0)) throw invalid_argument("phase_flat_d1: requires z < -1");
  const double f = phi(z);
  return (z - f) / (z * (f + 1.0)) * ((z + 1.0) * (f + 1.0) + a.value());
}

cplx phase_flat(cplx z, cplx phi_z, Deviation a) {
  return (z - phi_z) * ((z + phi_z) / 2.0 + 1.0 + a.value());
}

double solve_za(Deviation a) {
  const double av = a.value();
  auto q = [av](double z) { return (z + 1.0) * (phi(z) + 1.0) + av; };
  double lo = -3.0 - av;
  double hi = -1.0 - 1e-9;
  double qlo = q(lo);
  const double qhi = q(hi);
  if (!(qlo < 0.0 && qhi > 0.0))
    throw numeric_failure("solve_za: root not bracketed for a = " + std::to_string(av));
  while (hi - lo > 1e-14 * std::max(1.0, std::abs(lo))) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double qm = q(mid);
    if (qm < 0.0) {
      lo = mid;
      qlo = qm;
    } else {
      hi = mid;
    }
  }
  double z = 0.5 * (lo + hi);
  const double f = phi(z);
  const double dq = (f + 1.0) + (z + 1.0) * phi_prime(z);
  const double polished = z - q(z) / dq;
  if (std::abs(q(polished)) <= std::abs(q(z))) z = polished;
  const double res = std::abs(q(z));
  if (!(res <= 1e-12 * (1.0 + av)))
    throw numeric_failure("solve_za: residual too large", z, res);
  return z;
}

SaddleDiagnostics rate_flat(Deviation a) {
  const double av = a.value();
  const double z = solve_za(a);
  const double f = phi(z);
  const double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  SaddleDiagnostics d{};
  d.ic = InitialCondition::flat;
  d.a = av;
  d.saddle_lo = z;
  d.saddle_hi = f;
  d.rate = (f - z) * ((z + f) / 2.0 + 1.0 + av);
  d.phase_lo = -d.rate;
  d.phase_hi = 0.0;
  const double dq = (f + 1.0) + (z + 1.0) * phi_prime(z);
  d.second_lo = (z - f) / (z * (f + 1.0)) * dq;
  d.second_hi = std::nan("");
  d.eta = four_pi2 * (f - z) * (f / ((f + 1.0) * (f + 1.0)) + z / ((z + 1.0) * (z + 1.0)));
  return d;
}

double rate_asymptote(InitialCondition ic, Deviation a, Regime regime) {
  const double av = a.value();
  const bool small = regime == Regime::small;
  switch (ic) {
    case InitialCondition::flat:
      return small ? 4.0 / 3.0 * std::pow(av, 1.5) : (av + 1.0) * (av + 1.0) / 2.0;
    case InitialCondition::stationary:
      return small ? 2.0 / 3.0 * std::pow(av, 1.5) : av + 0.5 - std::log(av);
    case InitialCondition::packed:
      break;
  }
  throw invalid_argument("rate_asymptote: only flat and stationary expansions are available");
}

}  // namespace rbmld
