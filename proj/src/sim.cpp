#include "rbmld/sim.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "rbmld/errors.hpp"

namespace rbmld {

unsigned default_workers() {
  if (const char* env = std::getenv("RBMLD_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void SimConfig::validate() const {
  if (t < 1) throw invalid_argument("simulation: t must be a positive integer");
  if (step() > 1e-2 || !(step() > 0.0)) throw invalid_argument("simulation: dt must lie in (0, 1e-2]");
  if (reps < 1) throw invalid_argument("simulation: reps must be >= 1");
  if (ic != InitialCondition::packed && effective_cutoff() < 1)
    throw invalid_argument("simulation: cutoff must be >= 1");
  if (ic == InitialCondition::stationary && !(rho > 0.0 && rho <= 1.0))
    throw invalid_argument("simulation: rho must lie in (0, 1]");
}

double SimConfig::step() const { return dt > 0.0 ? dt : 1e-4 * std::max(1, t); }

int SimConfig::effective_cutoff() const { return cutoff > 0 ? cutoff : 4 * t; }

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), tag};
  return std::mt19937_64(seq);
}

constexpr std::uint32_t sim_tag = 0x53494d55;
constexpr std::uint32_t gue_tag = 0x47554531;

// Runs fn(i) for i in [0, count) on `workers` threads; slots are disjoint.
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// Positions x_lo..x_hi at time 0.
std::vector<double> initial_positions(const SimConfig& cfg, int lo, int hi, std::mt19937_64& rng) {
  std::vector<double> x(static_cast<std::size_t>(hi - lo + 1));
  switch (cfg.ic) {
    case InitialCondition::packed:
      std::fill(x.begin(), x.end(), 0.0);
      break;
    case InitialCondition::flat:
      for (int n = lo; n <= hi; ++n) x[static_cast<std::size_t>(n - lo)] = n;
      break;
    case InitialCondition::stationary: {
      std::exponential_distribution<double> right(1.0);
      std::exponential_distribution<double> left(cfg.rho);
      double pos = 0.0;
      for (int n = 0; n <= hi; ++n) {
        if (n > 0) pos += right(rng);
        if (n >= lo) x[static_cast<std::size_t>(n - lo)] = pos;
      }
      pos = 0.0;
      for (int n = -1; n >= lo; --n) {
        pos -= left(rng);
        if (n <= hi) x[static_cast<std::size_t>(n - lo)] = pos;
      }
      break;
    }
  }
  return x;
}

// Sequential one-sided reflection, lowest particle free.  With `bridge`, the
// neighbour constraint is checked against the maximum of a Brownian bridge
// (variance 2 per unit time) between the step endpoints rather than only at
// the endpoint, which removes the O(sqrt dt) lag of the plain scheme.
void evolve(std::vector<double>& x, double horizon, double dt, bool bridge, std::mt19937_64& rng) {
  if (horizon <= 0.0 || x.empty()) return;
  const auto steps = std::max<long long>(1, std::llround(horizon / dt));
  const double h = horizon / static_cast<double>(steps);
  const double sd = std::sqrt(h);
  const double var = 2.0 * h;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t m = x.size();
  for (long long k = 0; k < steps; ++k) {
    double below_old = x[0];
    x[0] += sd * normal(rng);
    for (std::size_t i = 1; i < m; ++i) {
      const double old = x[i];
      const double db = sd * normal(rng);
      double c = old + db;
      const double b = x[i - 1];
      if (bridge) {
        const double a = below_old + db;
        const double expo = (c > a && c > b) ? -2.0 * (c - a) * (c - b) / var : 0.0;
        if (expo > -40.0) {
          const double u = 1.0 - unif(rng);
          const double top = 0.5 * (a + b + std::sqrt((b - a) * (b - a) - 2.0 * var * std::log(u)));
          c = std::max(c, top);
        }
      } else {
        c = std::max(c, b);
      }
#ifndef NDEBUG
      if (c < b) throw numeric_failure("simulation: ordering violated");
#endif
      below_old = old;
      x[i] = c;
    }
    if ((k & 1023) == 0 && !std::isfinite(x[m - 1]))
      throw numeric_failure("simulation: non-finite position at step " + std::to_string(k));
  }
  for (double v : x)
    if (!std::isfinite(v)) throw numeric_failure("simulation: non-finite position at final step");
}

}  // namespace

std::vector<double> simulate_configuration(const SimConfig& cfg, int lo, int hi, double horizon,
                                           std::uint64_t rep) {
  if (hi < lo) throw invalid_argument("simulate_configuration: empty index range");
  auto rng = stream(cfg.seed, rep, sim_tag);
  std::vector<double> x = initial_positions(cfg, lo, hi, rng);
  evolve(x, horizon, cfg.step(), cfg.bridge, rng);
  return x;
}

SampleBatch simulate_samples(const SimConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const int lo = cfg.ic == InitialCondition::packed ? 1 : cfg.t - cfg.effective_cutoff();
  SampleBatch batch;
  batch.config = cfg;
  batch.values.assign(static_cast<std::size_t>(cfg.reps), 0.0);
  const unsigned workers = cfg.workers > 0 ? cfg.workers : default_workers();
  parallel_for(batch.values.size(), workers, [&](std::size_t r) {
    batch.values[r] = simulate_configuration(cfg, lo, cfg.t, cfg.t, r).back();
  });
  batch.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return batch;
}

std::vector<double> gue_top_sample(int n, double t, int count, std::uint64_t seed, unsigned workers) {
  if (n < 1) throw invalid_argument("gue_top_sample: n must be >= 1");
  if (!(t > 0.0) || !std::isfinite(t)) throw invalid_argument("gue_top_sample: t must be > 0");
  if (count < 1) throw invalid_argument("gue_top_sample: count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double sd_diag = std::sqrt(t);
  const double sd_off = std::sqrt(t / 2.0);
  parallel_for(out.size(), workers > 0 ? workers : default_workers(), [&](std::size_t i) {
    auto rng = stream(seed, i, gue_tag);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (int r = 0; r < n; ++r) {
      h(r, r) = sd_diag * normal(rng);
      for (int c = 0; c < r; ++c) {
        const double re = normal(rng);
        const double im = normal(rng);
        h(r, c) = sd_off * cplx(re, im);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    out[i] = es.eigenvalues()(n - 1);
  });
  return out;
}

TailEstimate tail_estimate(const SampleBatch& batch, Deviation a) {
  const double t = batch.config.t;
  const double level = 2.0 * t + a.value() * t;
  std::size_t hits = 0;
  for (double v : batch.values)
    if (v >= level) ++hits;
  const double n = static_cast<double>(batch.values.size());
  const double p = static_cast<double>(hits) / n;
  TailEstimate e;
  e.p_hat = p;
  e.hits = hits;
  e.stderr_ = std::sqrt(p * (1.0 - p) / n);
  e.upper_bound = hits == 0 ? 1.0 - std::pow(0.05, 1.0 / n) : p + 1.645 * e.stderr_;
  return e;
}

TailEstimate tail_estimate(const SimConfig& cfg, Deviation a) { return tail_estimate(simulate_samples(cfg), a); }

GapReport stationary_gap_check(const SimConfig& cfg, double horizon) {
  if (cfg.ic != InitialCondition::stationary || cfg.rho != 1.0)
    throw invalid_argument("stationary_gap_check: needs the stationary system with rho = 1");
  cfg.validate();
  const int half = cfg.effective_cutoff();
  if (half < 6) throw invalid_argument("stationary_gap_check: window too small (cutoff < 6)");
  const double tt = horizon < 0.0 ? cfg.t : horizon;
  const int width = 2 * half + 1;
  const int first = width / 3;           // offsets into the window
  const int last = width - width / 3 - 1;
  std::vector<std::vector<double>> per_rep(static_cast<std::size_t>(cfg.reps));
  const unsigned workers = cfg.workers > 0 ? cfg.workers : default_workers();
  parallel_for(per_rep.size(), workers, [&](std::size_t r) {
    const auto x = simulate_configuration(cfg, -half, half, tt, r);
    for (int i = first + 1; i <= last; ++i)
      per_rep[r].push_back(x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i - 1)]);
  });
  std::vector<double> gaps;
  for (auto& v : per_rep) gaps.insert(gaps.end(), v.begin(), v.end());
  const auto ks = ks_one_sample(gaps, [](double g) { return g <= 0.0 ? 0.0 : -std::expm1(-g); });
  const auto ms = mean_stderr(gaps);
  return {ks.statistic, ks.p_value, ms.mean, ms.stderr_, gaps.size()};
}

}  // namespace rbmld
