#pragma once

#include "rbmld/errors.hpp"

namespace rbmld {

// Branch k of the Lambert W function, i.e. the solution of w e^w = z with
// Im w in the usual k-th strip.  On the negative real axis the k != 0
// branches take the limit from above (Corless et al. convention).
cplx lambert_w(int k, cplx z);

// phi(z) = W_0(z e^z).  Identity on [-1, inf); on (-inf, -1) it is the other
// real pre-image, which lies in (-1, 0).
cplx phi(cplx z);
double phi(double z);

// phi'(z) = (1+z) phi(z) / (z (1+phi(z))).  Throws singularity_error at -1 and 0.
cplx phi_prime(cplx z);
double phi_prime(double z);

}  // namespace rbmld
