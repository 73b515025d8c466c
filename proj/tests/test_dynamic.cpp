#include <doctest.h>

#include <random>
#include <sstream>

#include "dvpsched/analysis.hpp"
#include "dvpsched/dynamic.hpp"
#include "oracles.hpp"

using namespace dvpsched;

namespace {

double prob_of(const StateDistribution& d, QueueState s) {
  for (const auto& [state, p] : d)
    if (state == s) return p;
  return 0.0;
}

ScenarioConfig random_config(std::mt19937& rng) {
  ScenarioConfig c;
  c.slots = 1 + static_cast<int>(rng() % 6);
  c.deadline = 1 + static_cast<int>(rng() % 5);
  c.p_error = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  c.batch = 1 + static_cast<int>(rng() % 2);
  c.backlog1 = static_cast<int>(rng() % 3);
  c.backlog2 = static_cast<int>(rng() % 4);
  return c;
}

}  // namespace

TEST_CASE("state space is the full rectangle") {
  CHECK(build_state_space({2, 0.1, 2, 1, 0, 0}).size() == 4);
  CHECK(build_state_space({2, 0.1, 2, 1, 1, 1}).size() == 12);
  CHECK(build_state_space({2, 0.1, 2, 2, 2, 3}).size() == 40);
  const auto feasible = feasible_states({2, 0.1, 2, 1, 1, 1});
  for (const auto& s : feasible) {
    CHECK(s.q1 <= 2);
    CHECK(s.total() <= 3);
  }
  CHECK(feasible.size() == 9);
}

TEST_CASE("transition examples") {
  const ScenarioConfig c{3, 0.4, 2, 1, 0, 0};
  for (int a = 0; a <= 3; ++a) {
    const auto d = transition_probs(c, {0, 0}, a);
    REQUIRE(d.size() == 1);
    CHECK(d[0].first == QueueState{0, 0});
    CHECK(d[0].second == doctest::Approx(1.0).epsilon(1e-14));
  }
  const ScenarioConfig one{1, 0.5, 2, 1, 0, 0};
  const auto d = transition_probs(one, {1, 0}, 1);
  REQUIRE(d.size() == 2);
  CHECK(prob_of(d, {0, 1}) == doctest::Approx(0.5));
  CHECK(prob_of(d, {1, 0}) == doctest::Approx(0.5));

  const ScenarioConfig two{2, 0.5, 2, 1, 1, 1};
  const auto e = transition_probs(two, {1, 1}, 1);
  REQUIRE(e.size() == 4);
  for (QueueState s : {QueueState{0, 1}, QueueState{0, 2}, QueueState{1, 0}, QueueState{1, 1}})
    CHECK(prob_of(e, s) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(transition_probs(two, {1, 1}, 3), DomainError);
  CHECK_THROWS_AS(transition_probs(two, {1, 1}, -1), DomainError);
}

TEST_CASE("kernels are stochastic, stay in the feasibility cone and agree") {
  std::mt19937 rng(211);
  for (int i = 0; i < 200; ++i) {
    const auto c = random_config(rng);
    for (const auto& s : build_state_space(c))
      for (int a = 0; a <= c.slots; ++a) {
        const auto m = transition_probs(c, s, a);
        const auto k = transition_probs_cases(c, s, a);
        double total = 0.0;
        for (const auto& [next, p] : m) {
          total += p;
          CHECK(next.q1 <= s.q1);
          CHECK(next.total() <= s.total());
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        for (const auto& [next, p] : m) CHECK(std::abs(prob_of(k, next) - p) <= 1e-12);
        for (const auto& [next, p] : k) CHECK(std::abs(prob_of(m, next) - p) <= 1e-12);
      }
  }
}

TEST_CASE("reward examples") {
  const ScenarioConfig c{4, 0.3, 2, 2, 1, 3};
  for (int a = 0; a <= 4; ++a) CHECK(reward(c, {2, 0}, a) == 0.0);
  CHECK(reward(c, {0, 3}, 1) == doctest::Approx(3 * 0.7).epsilon(1e-14));
  CHECK(reward(c, {1, 4}, 0) == doctest::Approx(4 * 0.7).epsilon(1e-14));
  const ScenarioConfig h{3, 0.5, 2, 1, 0, 1};
  CHECK(reward(h, {0, 1}, 1) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("value iteration examples") {
  const auto lossless = value_iteration({2, 0.0, 2, 1, 0, 0});
  CHECK(lossless.value(0, {1, 0}).value() == doctest::Approx(1.0));
  const ScenarioConfig dead{3, 1.0, 3, 1, 1, 1};
  const auto none = value_iteration(dead);
  for (int k = 0; k < 3; ++k)
    for (const auto& [s, e] : none.epoch_rows(k)) CHECK(e.value == 0.0);
  const ScenarioConfig tiny{1, 0.5, 2, 1, 0, 0};
  const auto t = value_iteration(tiny);
  CHECK(t.value(0, {1, 0}).value() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(t.value(2, {1, 0}).value() == 0.0);
}

TEST_CASE("value iteration matches expectimax over all policies") {
  for (int N : {1, 2})
    for (int w = 1; w <= 3; ++w)
      for (int a = 1; a <= 2; ++a)
        for (int x2 = 0; x2 <= 1; ++x2)
          for (double pe : {0.0, 0.25, 0.5, 0.9}) {
            const ScenarioConfig c{N, pe, w, 1, a - 1, x2};
            const double j0 = value_iteration(c).value(0, initial_state(c)).value();
            const double ref = oracle::best_expected_departures(
                {c.slots, c.p_error, c.deadline, c.batch, c.backlog1, c.backlog2});
            CHECK(j0 == doctest::Approx(ref).epsilon(1e-12));
          }
}

TEST_CASE("value table bounds and monotonicity in the remaining horizon") {
  std::mt19937 rng(223);
  for (int i = 0; i < 40; ++i) {
    const auto c = random_config(rng);
    const auto table = value_iteration(c);
    for (int k = 0; k < c.deadline; ++k)
      for (const auto& [s, e] : table.epoch_rows(k)) {
        CHECK(e.value <= s.total() + 1e-12);
        CHECK(e.value >= -1e-15);
        CHECK(e.value + 1e-12 >= table.value(k + 1, s).value());
        CHECK(e.action >= 0);
        CHECK(e.action <= c.slots);
      }
  }
}

TEST_CASE("Bellman work is (N + 1) |Q| w") {
  const ScenarioConfig c{5, 0.3, 4, 2, 1, 2};
  ValueIterationStats stats;
  value_iteration(c, &stats);
  const auto states = static_cast<long long>(feasible_states(c).size());
  CHECK(stats.bellman_evaluations == 6LL * states * 4);
  CHECK(states <= static_cast<long long>(build_state_space(c).size()));
}

TEST_CASE("ties go to the smallest action") {
  // With nothing queued at the relay and a lossless channel, every action
  // with n1 >= 1 drains queue 1 equally well in the last frame: zero reward.
  const ScenarioConfig c{3, 0.0, 1, 1, 0, 0};
  CHECK(value_iteration(c).action(0, {1, 0}).value() == 0);
}

TEST_CASE("baseline rules") {
  const ScenarioConfig c{4, 0.3, 3, 1, 2, 3};
  CHECK(baseline_policy(BaselineKind::max_weight, c, {3, 1}, 0) == 4);
  CHECK(baseline_policy(BaselineKind::max_weight, c, {1, 3}, 0) == 0);
  CHECK(baseline_policy(BaselineKind::max_weight, c, {2, 2}, 0) == 4);
  CHECK(baseline_policy(BaselineKind::weighted_fair, c, {1, 3}, 0) == 1);
  CHECK(baseline_policy(BaselineKind::weighted_fair, c, {1, 1}, 0) == 2);
  CHECK(baseline_policy(BaselineKind::weighted_fair, c, {0, 0}, 0) == 2);
  CHECK(baseline_policy(BaselineKind::weighted_fair, c, {1, 7}, 0) == 1);  // 0.5 rounds up
  CHECK(baseline_policy(BaselineKind::backpressure, c, {1, 2}, 0) == 0);
  CHECK(baseline_policy(BaselineKind::backpressure, c, {3, 1}, 0) == 4);
  CHECK(baseline_policy(BaselineKind::backpressure, c, {2, 1}, 0) == 2);  // tie 1 = 1
  CHECK(baseline_policy(BaselineKind::backpressure, c, {0, 0}, 0) == 2);
  CHECK(baseline_policy(BaselineKind::fifty_fifty, ScenarioConfig{5, 0.3, 3, 1, 0, 0}, {1, 0}, 0) == 3);
}

TEST_CASE("MDP maximizes expected departures against every baseline") {
  std::mt19937 rng(227);
  for (int i = 0; i < 60; ++i) {
    const auto c = random_config(rng);
    const auto mdp = exact_dvp_chain(c, value_iteration(c));
    for (auto b : {BaselineKind::max_weight, BaselineKind::weighted_fair, BaselineKind::backpressure,
                   BaselineKind::fifty_fifty}) {
      const auto base = exact_dvp_chain(c, b);
      CHECK(*mdp.mean_departures + 1e-12 >= *base.mean_departures);
    }
  }
}

TEST_CASE("MDP value equals the chain's expected departures") {
  std::mt19937 rng(229);
  for (int i = 0; i < 40; ++i) {
    const auto c = random_config(rng);
    const auto table = value_iteration(c);
    const auto chain = exact_dvp_chain(c, table);
    CHECK(*chain.mean_departures == doctest::Approx(table.value(0, initial_state(c)).value()).epsilon(1e-12));
  }
}

TEST_CASE("policy tabulation evaluates fixed policies") {
  std::mt19937 rng(233);
  for (int i = 0; i < 40; ++i) {
    const auto c = random_config(rng);
    const TransitionKernel kernel(c);
    std::vector<int> n1(static_cast<std::size_t>(c.deadline));
    for (auto& v : n1) v = static_cast<int>(rng() % (c.slots + 1));
    const Policy p(Schedule::from_n1(c.slots, n1));
    const auto table = tabulate_policy(kernel, p);
    CHECK(table.value(0, initial_state(c)).value() ==
          doctest::Approx(*exact_dvp_chain(c, p).mean_departures).epsilon(1e-12));
    CHECK(exact_dvp_chain(c, table).dvp == doctest::Approx(exact_dvp_chain(c, p).dvp).epsilon(1e-12));
  }
}

TEST_CASE("policy table text round-trip") {
  const ScenarioConfig c{3, 0.33, 3, 1, 1, 2};
  const auto table = value_iteration(c);
  std::ostringstream os;
  table.write(os);
  std::istringstream is(os.str());
  const auto back = PolicyTable::read(is);
  CHECK(back.config() == c);
  CHECK(back.size() == table.size());
  for (int k = 0; k < 3; ++k)
    for (const auto& [s, e] : table.epoch_rows(k)) {
      CHECK(back.action(k, s).value() == e.action);
      CHECK(back.value(k, s).value() == doctest::Approx(e.value).epsilon(1e-11));
    }
  std::ostringstream again;
  back.write(again);
  CHECK(again.str() == os.str());
}

TEST_CASE("policy table parse errors carry line numbers") {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream is(text);
    try {
      PolicyTable::read(is);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  const std::string header = "policy-table N=2 pe=0.5 w=2 y=1 x1=0 x2=0\n";
  CHECK(line_of("") == 1);
  CHECK(line_of("0 1 0 1 0.5\n") == 1);
  CHECK(line_of(header + "# comment\n0 1 0 1\n") == 3);
  CHECK(line_of(header + "0 1 0 1 0.5\n0 0 1 x 0.2\n") == 3);
  CHECK(line_of(header + "\n\n2 1 0 1 0.5\n") == 4);
  CHECK(line_of(header + "0 1 0 3 0.5\n") == 2);
  CHECK(line_of(header + "0 -1 0 1 0.5\n") == 2);
  CHECK(line_of("policy-table N=2 pe=0.5 w=2 y=1 x1=0\n") == 1);
  CHECK(line_of(header + "0 1 0 1 0.5\n") == 0);
}
