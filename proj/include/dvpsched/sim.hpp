#pragma once

// Monte Carlo estimate of the DVP and of E[D(w)] for any policy.
// Replication r draws from its own stream keyed by (seed, r), so results do
// not depend on how replications are spread across threads.

#include <cstdint>
#include <vector>

#include "dvpsched/core.hpp"
#include "dvpsched/policy.hpp"

namespace dvpsched {

/// SplitMix64 sequence started from a hash of (seed, stream).
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t state_;
};

/// Binomial draws by inversion of precomputed cdf rows for 0..max_trials.
class BinomialSampler {
 public:
  BinomialSampler(int max_trials, double p);
  int draw(int n, CounterStream& rng) const;

 private:
  std::vector<std::vector<double>> cdfs_;
};

struct SimSpec {
  long long replications = 1'000'000;
  std::uint64_t seed = 1;
  Policy policy;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct SimResult {
  double dvp_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double mean_departures = 0.0;
  long long replications = 0;
  long long violations = 0;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// 95% Wilson score interval for `successes` out of `trials`.
Interval wilson_interval(long long successes, long long trials, double z = 1.959963984540054);

SimResult simulate(const ScenarioConfig& cfg, const SimSpec& spec);

}  // namespace dvpsched
