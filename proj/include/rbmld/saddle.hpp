#pragma once

#include <string_view>

#include "rbmld/errors.hpp"

namespace rbmld {

enum class InitialCondition { packed, flat, stationary };

std::string_view to_string(InitialCondition ic);
InitialCondition parse_initial_condition(std::string_view name);

// Deviation a > 0 of the level 2t + at above the typical position 2t.
class Deviation {
 public:
  explicit Deviation(double a);
  double value() const { return a_; }

 private:
  double a_;
};

// Saddle data.  packed/stationary: lo = w_-, hi = w_+, phases H(w_-), H(w_+),
// second = H''(w_-), H''(w_+).  flat: lo = z_a, hi = phi(z_a), phases G(z_a), 0,
// second = G''(z_a), and eta.
struct SaddleDiagnostics {
  InitialCondition ic;
  double a;
  double saddle_lo;
  double saddle_hi;
  double phase_lo;
  double phase_hi;
  double second_lo;
  double second_hi;
  double eta;
  double rate;
};

// H(w) = (w^2-1)/2 + (2+a)(w+1) + log(-w), principal log.
cplx phase_packed(cplx w, Deviation a);
cplx phase_packed_d1(cplx w, Deviation a);
cplx phase_packed_d2(cplx w);

SaddleDiagnostics saddle_packed(Deviation a);
double rate_packed(Deviation a);
double rate_stat(Deviation a);

// G(z) = (z^2 - phi^2)/2 + (1+a)(z - phi), phi = phi(z).
double phase_flat(double z, Deviation a);
double phase_flat_d1(double z, Deviation a);
cplx phase_flat(cplx z, cplx phi_z, Deviation a);

// Unique root of (z+1)(phi(z)+1) + a on (-inf, -1).
double solve_za(Deviation a);
SaddleDiagnostics rate_flat(Deviation a);

enum class Regime { small, large };
double rate_asymptote(InitialCondition ic, Deviation a, Regime regime);

}  // namespace rbmld
