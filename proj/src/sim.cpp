#include "dvpsched/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "dvpsched/parallel.hpp"

namespace dvpsched {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

CounterStream::CounterStream(std::uint64_t seed, std::uint64_t stream)
    : state_(mix64(seed + 0x9e3779b97f4a7c15ULL) ^ mix64(stream * 0xd1b54a32d192ed03ULL + 1)) {}

std::uint64_t CounterStream::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_);
}

double CounterStream::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

BinomialSampler::BinomialSampler(int max_trials, double p) {
  for (int n = 0; n <= max_trials; ++n) {
    auto row = binomial_row(n, p);
    std::vector<double> cdf(row.size());
    std::partial_sum(row.begin(), row.end(), cdf.begin());
    cdf.back() = 1.0;
    cdfs_.push_back(std::move(cdf));
  }
}

int BinomialSampler::draw(int n, CounterStream& rng) const {
  if (n < 0 || n >= static_cast<int>(cdfs_.size()))
    throw DomainError("sampler built for at most " + std::to_string(cdfs_.size() - 1) +
                      " trials, asked for " + std::to_string(n));
  const auto& cdf = cdfs_[static_cast<std::size_t>(n)];
  const double u = rng.uniform();
  int r = 0;
  while (u >= cdf[static_cast<std::size_t>(r)]) ++r;
  return r;
}

Interval wilson_interval(long long successes, long long trials, double z) {
  if (trials <= 0) throw DomainError("Wilson interval needs at least one trial");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::clamp(std::min(center - half, p), 0.0, 1.0),
          std::clamp(std::max(center + half, p), 0.0, 1.0)};
}

SimResult simulate(const ScenarioConfig& cfg, const SimSpec& spec) {
  cfg.validate();
  if (spec.replications < 1) throw DomainError("replications must be >= 1");
  const BinomialSampler sampler(cfg.slots, cfg.p_success());

  // Fixed-size blocks keep the work split independent of the thread count.
  constexpr long long kBlock = 4096;
  const auto blocks = static_cast<std::size_t>((spec.replications + kBlock - 1) / kBlock);
  std::vector<long long> violations(blocks, 0);
  std::vector<long long> departures(blocks, 0);

  parallel_for(
      blocks,
      [&](std::size_t b) {
        const long long first = static_cast<long long>(b) * kBlock;
        const long long last = std::min(spec.replications, first + kBlock);
        long long viol = 0, dep = 0;
        for (long long r = first; r < last; ++r) {
          CounterStream rng(spec.seed, static_cast<std::uint64_t>(r));
          QueueState q = initial_state(cfg);
          for (int k = 0; k < cfg.deadline; ++k) {
            const int n1 = spec.policy.action(cfg, k, q);
            if (n1 < 0 || n1 > cfg.slots)
              throw ConfigError("policy returned n1=" + std::to_string(n1) + " at epoch " +
                                std::to_string(k) + " state " + q.to_string());
            const int s1 = sampler.draw(n1, rng);
            const int s2 = sampler.draw(cfg.slots - n1, rng);
            const auto step = step_queues(q, s1, s2);
            dep += step.outcome.d2;
            q = step.next;
          }
          if (!q.empty()) ++viol;
        }
        violations[b] = viol;
        departures[b] = dep;
      },
      spec.threads);

  SimResult out;
  out.replications = spec.replications;
  for (std::size_t b = 0; b < blocks; ++b) {
    out.violations += violations[b];
    // Integer totals, so the reduction is exact and order independent.
    out.mean_departures += static_cast<double>(departures[b]);
  }
  out.mean_departures /= static_cast<double>(spec.replications);
  out.dvp_hat = static_cast<double>(out.violations) / static_cast<double>(spec.replications);
  const auto ci = wilson_interval(out.violations, spec.replications);
  out.ci_low = ci.low;
  out.ci_high = ci.high;
  return out;
}

}  // namespace dvpsched
