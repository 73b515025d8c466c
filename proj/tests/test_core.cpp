#include <doctest.h>

#include <cmath>
#include <random>

#include "dvpsched/core.hpp"
#include "dvpsched/format.hpp"
#include "dvpsched/sim.hpp"
#include "oracles.hpp"

using namespace dvpsched;

TEST_CASE("binomial pmf hand values") {
  CHECK(binomial_pmf(2, 0.5, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(binomial_pmf(4, 1.0, 4) == 1.0);
  CHECK(binomial_pmf(3, 0.8, 2) == doctest::Approx(0.384).epsilon(1e-13));
  CHECK(binomial_pmf(0, 0.3, 0) == 1.0);
  CHECK(binomial_pmf(5, 0.0, 0) == 1.0);
  CHECK(binomial_pmf(5, 0.0, 1) == 0.0);
}

TEST_CASE("binomial pmf rejects out-of-support arguments") {
  CHECK_THROWS_AS(binomial_pmf(3, 0.5, 4), DomainError);
  CHECK_THROWS_AS(binomial_pmf(3, 0.5, -1), DomainError);
  CHECK_THROWS_AS(binomial_pmf(3, 1.5, 1), DomainError);
  CHECK_THROWS_AS(binomial_pmf(-1, 0.5, 0), DomainError);
}

TEST_CASE("binomial pmf rows sum to one and match the product-form oracle") {
  for (int n = 0; n <= 60; n += 3)
    for (double p : {0.0, 0.1, 0.33, 0.5, 0.8, 1.0}) {
      double sum = 0.0;
      for (int r = 0; r <= n; ++r) {
        const double v = binomial_pmf(n, p, r);
        sum += v;
        CHECK(v == doctest::Approx(oracle::pmf(n, p, r)).epsilon(1e-11));
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("binomial cdf hand values and monotonicity") {
  CHECK(binomial_cdf(2, 0.5, 2) == 1.0);
  CHECK(binomial_cdf(2, 0.5, 0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(binomial_cdf(5, 0.6, 2) == doctest::Approx(0.31744).epsilon(1e-13));
  CHECK_THROWS_AS(binomial_cdf(2, 0.5, 3), DomainError);
  CHECK_THROWS_AS(binomial_cdf(2, 0.5, -1), DomainError);
  for (int n : {1, 7, 20}) {
    double prev = 0.0;
    for (int r = 0; r <= n; ++r) {
      const double v = binomial_cdf(n, 0.37, r);
      CHECK(v >= prev);
      prev = v;
    }
    CHECK(prev == 1.0);
  }
  CHECK(binomial_cdf_clamped(4, 0.5, -1) == 0.0);
  CHECK(binomial_cdf_clamped(4, 0.5, 9) == 1.0);
  CHECK(binomial_cdf_clamped(0, 0.5, -1) == 0.0);
  CHECK(binomial_cdf_clamped(0, 0.5, 0) == 1.0);
}

TEST_CASE("step_queues examples") {
  auto r = step_queues({1, 0}, 1, 1);
  CHECK(r.next == QueueState{0, 1});
  CHECK(r.outcome.d2 == 0);
  r = step_queues({0, 0}, 3, 3);
  CHECK(r.next == QueueState{0, 0});
  CHECK(r.outcome.d2 == 0);
  r = step_queues({2, 2}, 1, 3);
  CHECK(r.next == QueueState{1, 1});
  CHECK(r.outcome.d2 == 2);
  CHECK(r.outcome.d1 == 1);
}

TEST_CASE("step_queues conserves packets and respects outcome bounds") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> q(0, 9), s(0, 6);
  for (int i = 0; i < 5000; ++i) {
    const QueueState st{q(rng), q(rng)};
    const int s1 = s(rng), s2 = s(rng);
    const auto r = step_queues(st, s1, s2);
    CHECK(r.next.total() == st.total() - r.outcome.d2);
    CHECK(r.outcome.d1 <= st.q1);
    CHECK(r.outcome.d1 <= s1);
    CHECK(r.outcome.d2 <= st.q2);
    CHECK(r.outcome.d2 <= s2);
    CHECK(r.next.q1 == std::max(st.q1 - s1, 0));
    CHECK(r.next.q2 == std::max(st.q2 - s2, 0) + std::min(st.q1, s1));
  }
}

TEST_CASE("departures over a trace equal load minus residual backlog") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    oracle::Scenario sc{1 + static_cast<int>(rng() % 5), 0.3, 1 + static_cast<int>(rng() % 6),
                        1 + static_cast<int>(rng() % 3), static_cast<int>(rng() % 3),
                        static_cast<int>(rng() % 3)};
    QueueState st{sc.y + sc.x1, sc.x2};
    const int L = st.total();
    int departed = 0;
    std::vector<int> s1s, s2s;
    for (int k = 0; k < sc.w; ++k) {
      const int n1 = static_cast<int>(rng() % (sc.N + 1));
      const int s1 = static_cast<int>(rng() % (n1 + 1));
      const int s2 = static_cast<int>(rng() % (sc.N - n1 + 1));
      s1s.push_back(s1);
      s2s.push_back(s2);
      const auto r = step_queues(st, s1, s2);
      departed += r.outcome.d2;
      st = r.next;
    }
    CHECK(departed == L - st.q1 - st.q2);
    // The cumulative-service characterization agrees with the trace.
    CHECK(oracle::drained_by_cumulative(sc, s1s, s2s) == st.empty());
  }
}

TEST_CASE("cumulative service trial counts") {
  const auto flat = Schedule::from_n1(4, {2, 2, 2});
  CHECK(cumulative_service_params(flat, 1, 0) == 0);
  CHECK(cumulative_service_params(flat, 1, 3) == 6);
  const auto s = Schedule::from_n1(4, {1, 3, 2});
  CHECK(cumulative_service_params(s, 2, 2) == 4);
  CHECK_THROWS_AS(cumulative_service_params(s, 2, 4), DomainError);
  CHECK(trailing_service_params(s, 1, 2) == 5);
  CHECK(trailing_service_params(s, 2, 0) == 0);
}

TEST_CASE("scenario validation") {
  ScenarioConfig ok{4, 0.2, 3, 1, 0, 0};
  CHECK_NOTHROW(ok.validate());
  CHECK(ok.total_load() == 1);
  auto bad = ok;
  bad.slots = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = ok;
  bad.p_error = -0.1;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = ok;
  bad.deadline = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = ok;
  bad.batch = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = ok;
  bad.backlog2 = -1;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("schedule construction") {
  const auto s = Schedule::from_n1(5, {3, 0, 5});
  CHECK(s.n2_vector() == std::vector<int>{2, 5, 0});
  CHECK(s.to_string() == "3,0,5");
  CHECK_FALSE(s.in_bound_domain());
  CHECK(Schedule::from_n2(5, std::vector<int>{2, 5, 0}) == s);
  CHECK_THROWS_AS(Schedule::from_n1(5, {6}), DomainError);
  CHECK_THROWS_AS(Schedule::from_n1(5, {-1}), DomainError);
  CHECK(Schedule::uniform(4, 2, 2).in_bound_domain());
}

TEST_CASE("sampled services stay in range and average n(1 - p_e)") {
  const double p = 0.65;
  BinomialSampler sampler(8, p);
  CounterStream rng(99, 0);
  for (int n : {0, 1, 3, 8}) {
    const int draws = 200000;
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) {
      const int v = sampler.draw(n, rng);
      REQUIRE(v >= 0);
      REQUIRE(v <= n);
      sum += v;
    }
    const double se = std::sqrt(n * p * (1 - p) / draws);
    CHECK(std::abs(sum / draws - n * p) <= 3.0 * se + 1e-12);
  }
}

TEST_CASE("number formatting") {
  CHECK(format_probability(0.75) == "0.75");
  CHECK(format_probability(1.0) == "1");
  CHECK(format_probability(1.234567890123e-5) == "1.23456789e-05");
  CHECK(format_real(0.33) == "0.33");
  double back = 0.0;
  REQUIRE(parse_double(format_real(0.1 + 0.2), back));
  CHECK(back == 0.1 + 0.2);
  int v = 0;
  CHECK_FALSE(parse_int("3x", v));
  CHECK(parse_int_list("2, 2 ,3") == std::vector<int>{2, 2, 3});
  CHECK_THROWS_AS(parse_int_list("2,a"), DomainError);
}
