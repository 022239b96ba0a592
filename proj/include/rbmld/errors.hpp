#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace rbmld {

using cplx = std::complex<double>;

// Bad input: out-of-range parameters, points on a cut, malformed configs.
class invalid_argument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Evaluation at a removable-looking but genuine singularity (branch point, pole).
class singularity_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iteration or quadrature did not meet its tolerance.  Carries the last
// iterate and its residual when that makes sense.
class numeric_failure : public std::runtime_error {
 public:
  explicit numeric_failure(const std::string& what,
                           cplx last = {std::numeric_limits<double>::quiet_NaN(), 0.0},
                           double residual = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), last_(last), residual_(residual) {}

  cplx last_iterate() const { return last_; }
  double residual() const { return residual_; }

 private:
  cplx last_;
  double residual_;
};

}  // namespace rbmld
