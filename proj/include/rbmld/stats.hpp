#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace rbmld {

struct KsResult {
  double statistic;
  double p_value;
  std::size_t n;  // effective sample size
};

// Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 lambda^2}.
double kolmogorov_q(double lambda);

KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct MeanStderr {
  double mean;
  double stderr_;
};
MeanStderr mean_stderr(const std::vector<double>& x);

// Standard normal distribution function.
double normal_cdf(double x);

}  // namespace rbmld
