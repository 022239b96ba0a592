#pragma once

#include <cstdint>
#include <vector>

#include "rbmld/saddle.hpp"
#include "rbmld/stats.hpp"

namespace rbmld {

struct SimConfig {
  InitialCondition ic = InitialCondition::packed;
  double rho = 1.0;         // stationary only: density of the left half
  int t = 1;                // time horizon and tagged index
  double dt = 0.0;          // <= 0 picks 1e-4 max(1, t)
  int cutoff = 0;           // particles kept below the tagged one; <= 0 picks 4t
  int reps = 1;
  std::uint64_t seed = 1;
  unsigned workers = 0;     // 0: RBMLD_WORKERS or hardware concurrency
  bool bridge = true;       // Brownian-bridge crossing correction in the reflection

  void validate() const;
  double step() const;
  int effective_cutoff() const;
};

struct SampleBatch {
  std::vector<double> values;
  SimConfig config;
  double elapsed;
};

// Draws of x_t(t).  Packed: particles 1..t from 0 (particle 1 is free).
// Flat: x_n(0) = n for n = t - cutoff..t.  Stationary: x_0 = 0 with Exp(1)
// gaps to the right and Exp(rho) gaps to the left, truncated at t - cutoff.
SampleBatch simulate_samples(const SimConfig& cfg);

// Whole configuration x_lo..x_hi at time `horizon` for one replica.
std::vector<double> simulate_configuration(const SimConfig& cfg, int lo, int hi, double horizon,
                                           std::uint64_t rep);

// Largest eigenvalue of n x n GUE matrices with E|H_ij|^2 = t.
std::vector<double> gue_top_sample(int n, double t, int count, std::uint64_t seed, unsigned workers = 0);

struct TailEstimate {
  double p_hat;
  double stderr_;
  double upper_bound;  // one-sided 95% bound, meaningful when there are no hits
  std::size_t hits;
};
TailEstimate tail_estimate(const SampleBatch& batch, Deviation a);
TailEstimate tail_estimate(const SimConfig& cfg, Deviation a);

struct GapReport {
  double ks_stat;
  double ks_p_value;
  double mean_gap;
  double mean_stderr;
  std::size_t count;
};
// Stationary rho = 1 system on indices -cutoff..cutoff; gaps of the middle
// third at time `horizon` (negative: cfg.t) pooled over replicas, tested
// against Exp(1).
GapReport stationary_gap_check(const SimConfig& cfg, double horizon = -1.0);

unsigned default_workers();

}  // namespace rbmld
