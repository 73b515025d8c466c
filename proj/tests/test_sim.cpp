#include <doctest.h>

#include <cmath>
#include <numeric>

#include "dvpsched/analysis.hpp"
#include "dvpsched/dynamic.hpp"
#include "dvpsched/sim.hpp"

using namespace dvpsched;

namespace {

const ScenarioConfig kHand{2, 0.5, 2, 1, 0, 0};

SimSpec spec_for(Policy policy, long long reps, std::uint64_t seed, unsigned threads = 0) {
  SimSpec s{reps, seed, std::move(policy), threads};
  return s;
}

}  // namespace

TEST_CASE("lossless draining schedule never violates") {
  ScenarioConfig c = kHand;
  c.p_error = 0.0;
  const auto r = simulate(c, spec_for(Schedule::from_n1(2, {1, 1}), 10000, 3));
  CHECK(r.dvp_hat == 0.0);
  CHECK(r.violations == 0);
  CHECK(r.ci_low == 0.0);
  CHECK(r.mean_departures == 1.0);
}

TEST_CASE("hand example brackets the exact value") {
  const auto r = simulate(kHand, spec_for(Schedule::from_n1(2, {1, 1}), 1'000'000, 2024));
  CHECK(r.ci_low <= 0.75);
  CHECK(r.ci_high >= 0.75);
  CHECK(r.dvp_hat >= 0.745);
  CHECK(r.dvp_hat <= 0.755);
  CHECK(r.mean_departures == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("interval contains the estimate and stays in [0, 1]") {
  for (long long n : {1LL, 7LL, 100LL, 12345LL})
    for (long long k = 0; k <= n; k += std::max(1LL, n / 9)) {
      const auto ci = wilson_interval(k, n);
      const double p = static_cast<double>(k) / static_cast<double>(n);
      CHECK(ci.low <= p);
      CHECK(ci.high >= p);
      CHECK(ci.low >= 0.0);
      CHECK(ci.high <= 1.0);
    }
  CHECK(wilson_interval(0, 50).low == 0.0);
  CHECK(wilson_interval(50, 50).high == 1.0);
  const auto ci = wilson_interval(30, 100);
  // Textbook Wilson 95% interval for 30/100.
  CHECK(ci.low == doctest::Approx(0.2189).epsilon(1e-3));
  CHECK(ci.high == doctest::Approx(0.3958).epsilon(1e-3));
  CHECK_THROWS_AS(wilson_interval(0, 0), DomainError);
}

TEST_CASE("results do not depend on the worker count") {
  const ScenarioConfig c{4, 0.4, 4, 1, 2, 2};
  const Policy p = value_iteration(c);
  const auto one = simulate(c, spec_for(p, 50'000, 77, 1));
  for (unsigned t : {2u, 3u, 8u, 0u}) {
    const auto other = simulate(c, spec_for(p, 50'000, 77, t));
    CHECK(other.violations == one.violations);
    CHECK(other.dvp_hat == one.dvp_hat);
    CHECK(other.ci_low == one.ci_low);
    CHECK(other.ci_high == one.ci_high);
    CHECK(other.mean_departures == one.mean_departures);
  }
  const auto reseeded = simulate(c, spec_for(p, 50'000, 78, 1));
  CHECK(reseeded.violations != one.violations);
}

TEST_CASE("counter streams are deterministic and distinct") {
  CounterStream a(5, 9), b(5, 9), c(5, 10), d(6, 9);
  const auto x = a.next();
  CHECK(x == b.next());
  CHECK(x != c.next());
  CHECK(x != d.next());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("Wilson interval covers the exact value in at least 93 of 100 runs") {
  const ScenarioConfig c{3, 0.33, 3, 1, 1, 1};
  for (const Policy& p : {Policy(Schedule::from_n1(3, {2, 2, 1})), Policy(BaselineKind::backpressure)}) {
    const double exact = exact_dvp_chain(c, p).dvp;
    int covered = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const auto r = simulate(c, spec_for(p, 4000, seed));
      if (r.ci_low <= exact && exact <= r.ci_high) ++covered;
    }
    MESSAGE(p.describe() << ": covered " << covered << " of 100, exact " << exact);
    CHECK(covered >= 93);
  }
}

TEST_CASE("estimator error shrinks like one over root replications") {
  const ScenarioConfig c{3, 0.4, 3, 1, 1, 0};
  const Policy p = Schedule::from_n1(3, {2, 1, 1});
  const double exact = exact_dvp_chain(c, p).dvp;
  std::vector<double> log_r, log_rmse;
  for (long long reps = 500; reps <= 32000; reps *= 2) {
    double sq = 0.0;
    const int seeds = 60;
    for (int s = 0; s < seeds; ++s) {
      const auto r = simulate(c, spec_for(p, reps, 1000 + static_cast<std::uint64_t>(s)));
      sq += (r.dvp_hat - exact) * (r.dvp_hat - exact);
    }
    log_r.push_back(std::log(static_cast<double>(reps)));
    log_rmse.push_back(0.5 * std::log(sq / seeds));
  }
  const double n = static_cast<double>(log_r.size());
  const double mx = std::accumulate(log_r.begin(), log_r.end(), 0.0) / n;
  const double my = std::accumulate(log_rmse.begin(), log_rmse.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < log_r.size(); ++i) {
    sxy += (log_r[i] - mx) * (log_rmse[i] - my);
    sxx += (log_r[i] - mx) * (log_r[i] - mx);
  }
  const double slope = sxy / sxx;
  MESSAGE("log-log slope " << slope);
  CHECK(slope > -0.65);
  CHECK(slope < -0.35);
}

TEST_CASE("simulation reports missing policy-table states") {
  PolicyTable table(kHand);
  table.set(0, {1, 0}, {1, 0.0});
  CHECK_THROWS_AS(simulate(kHand, spec_for(table, 100, 1)), ConfigError);
  CHECK_THROWS_AS(simulate(kHand, spec_for(Schedule::from_n1(2, {1, 1}), 0, 1)), DomainError);
}

TEST_CASE("simulated departures track the chain's expectation") {
  const ScenarioConfig c{4, 0.4, 4, 1, 2, 2};
  const auto table = value_iteration(c);
  const auto exact = exact_dvp_chain(c, table);
  const auto r = simulate(c, spec_for(table, 200'000, 11));
  CHECK(r.mean_departures == doctest::Approx(*exact.mean_departures).epsilon(0.01));
  CHECK(r.ci_low <= exact.dvp);
  CHECK(r.ci_high >= exact.dvp);
}
