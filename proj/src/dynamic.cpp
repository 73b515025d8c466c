#include "dvpsched/dynamic.hpp"

#include <algorithm>
#include <map>

namespace dvpsched {

namespace {

void check_action(const ScenarioConfig& cfg, int n1) {
  if (n1 < 0 || n1 > cfg.slots)
    throw DomainError("action n1=" + std::to_string(n1) + " outside {0.." +
                      std::to_string(cfg.slots) + "}");
}

StateDistribution to_sorted(const std::map<QueueState, double>& acc) {
  StateDistribution out;
  out.reserve(acc.size());
  for (const auto& [s, p] : acc)
    if (p > 0.0) out.emplace_back(s, p);
  return out;
}

// P{X >= k} for a pmf row.
double tail_at_least(const std::vector<double>& row, int k) {
  if (k <= 0) return 1.0;
  double sum = 0.0;
  for (std::size_t r = static_cast<std::size_t>(k); r < row.size(); ++r) sum += row[r];
  return sum;
}

double point(const std::vector<double>& row, int k) {
  if (k < 0 || k >= static_cast<int>(row.size())) return 0.0;
  return row[static_cast<std::size_t>(k)];
}

// Probability that queue 2 ends at `next_q2` given its own content `q2`,
// the relayed inflow `inflow` and link-2 service row: either service fell
// short (exact s2) or it drained the queue (s2 >= q2, only when next == inflow).
double second_queue_prob(const std::vector<double>& s2_row, int q2, int inflow, int next_q2) {
  const int residual = next_q2 - inflow;
  if (residual < 0) return 0.0;
  if (residual == 0) return tail_at_least(s2_row, q2);
  return point(s2_row, q2 - residual);
}

}  // namespace

std::vector<QueueState> build_state_space(const ScenarioConfig& cfg) {
  std::vector<QueueState> out;
  const int a = cfg.first_hop_load();
  const int l = cfg.total_load();
  out.reserve(static_cast<std::size_t>((a + 1) * (l + 1)));
  for (int q1 = 0; q1 <= a; ++q1)
    for (int q2 = 0; q2 <= l; ++q2) out.push_back({q1, q2});
  return out;
}

std::vector<QueueState> feasible_states(const ScenarioConfig& cfg) {
  auto all = build_state_space(cfg);
  std::erase_if(all, [&](QueueState s) { return s.total() > cfg.total_load(); });
  return all;
}

StateDistribution transition_probs(const ScenarioConfig& cfg, QueueState state, int n1) {
  check_action(cfg, n1);
  const auto row1 = binomial_row(n1, cfg.p_success());
  const auto row2 = binomial_row(cfg.slots - n1, cfg.p_success());
  std::map<QueueState, double> acc;
  for (int s1 = 0; s1 <= n1; ++s1) {
    for (int s2 = 0; s2 <= cfg.slots - n1; ++s2) {
      const double p = row1[static_cast<std::size_t>(s1)] * row2[static_cast<std::size_t>(s2)];
      acc[step_queues(state, s1, s2).next] += p;
    }
  }
  return to_sorted(acc);
}

StateDistribution transition_probs_cases(const ScenarioConfig& cfg, QueueState state, int n1) {
  check_action(cfg, n1);
  const auto row1 = binomial_row(n1, cfg.p_success());
  const auto row2 = binomial_row(cfg.slots - n1, cfg.p_success());
  const int l1 = state.q1;
  const int l2 = state.q2;
  std::map<QueueState, double> acc;

  if (l1 == 0 && l2 == 0) {
    acc[{0, 0}] = 1.0;
    return to_sorted(acc);
  }
  if (l1 == 0) {
    // Only link 2 matters.
    for (int n = 0; n <= l2; ++n) acc[{0, n}] = second_queue_prob(row2, l2, 0, n);
    return to_sorted(acc);
  }
  if (l2 == 0) {
    // Only link 1 matters; whatever it forwards lands in queue 2.
    for (int m = 0; m <= l1; ++m) {
      const double p = m > 0 ? point(row1, l1 - m) : tail_at_least(row1, l1);
      acc[{m, l1 - m}] = p;
    }
    return to_sorted(acc);
  }

  for (int m = 0; m <= l1; ++m) {
    for (int n = 0; n <= l1 + l2; ++n) {
      // Growth of queue 1 or of the total is impossible.
      if (m > l1 || m + n > l1 + l2) continue;
      double p = 0.0;
      if (m > 0 && n > 0) {
        // Interior: s1 = l1 - m exactly.
        p = point(row1, l1 - m) * second_queue_prob(row2, l2, l1 - m, n);
      } else if (m == 0 && n > 0) {
        // Queue 1 drained: s1 >= l1.
        p = tail_at_least(row1, l1) * second_queue_prob(row2, l2, l1, n);
      } else if (m == l1 && n == 0) {
        // Queue 2 drained with nothing relayed.
        p = point(row1, 0) * tail_at_least(row2, l2);
      }
      // m < l1 with n == 0 cannot happen: relayed packets sit in queue 2.
      if (p > 0.0) acc[{m, n}] = p;
    }
  }
  return to_sorted(acc);
}

double reward(const ScenarioConfig& cfg, QueueState state, int n1) {
  check_action(cfg, n1);
  const int n2 = cfg.slots - n1;
  const auto row = binomial_row(n2, cfg.p_success());
  double sum = 0.0;
  for (int r = 0; r <= n2; ++r) sum += std::min(state.q2, r) * row[static_cast<std::size_t>(r)];
  return sum;
}

TransitionKernel::TransitionKernel(const ScenarioConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  states_ = feasible_states(cfg_);
  const int width = cfg_.total_load() + 1;
  index_.assign(static_cast<std::size_t>((cfg_.first_hop_load() + 1) * width), -1);
  for (std::size_t i = 0; i < states_.size(); ++i)
    index_[static_cast<std::size_t>(states_[i].q1 * width + states_[i].q2)] = static_cast<int>(i);

  const int actions = cfg_.slots + 1;
  arcs_.resize(states_.size() * static_cast<std::size_t>(actions));
  rewards_.resize(arcs_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) {
    for (int a = 0; a < actions; ++a) {
      const std::size_t slot = i * static_cast<std::size_t>(actions) + static_cast<std::size_t>(a);
      for (const auto& [next, p] : transition_probs(cfg_, states_[i], a))
        arcs_[slot].push_back({index_of(next), p});
      rewards_[slot] = dvpsched::reward(cfg_, states_[i], a);
    }
  }
}

int TransitionKernel::index_of(QueueState s) const {
  if (s.q1 < 0 || s.q2 < 0 || s.q1 > cfg_.first_hop_load() || s.q2 > cfg_.total_load()) return -1;
  return index_[static_cast<std::size_t>(s.q1 * (cfg_.total_load() + 1) + s.q2)];
}

const std::vector<TransitionKernel::Arc>& TransitionKernel::arcs(int state_index, int n1) const {
  return arcs_.at(static_cast<std::size_t>(state_index) * static_cast<std::size_t>(cfg_.slots + 1) +
                  static_cast<std::size_t>(n1));
}

double TransitionKernel::reward(int state_index, int n1) const {
  return rewards_.at(static_cast<std::size_t>(state_index) *
                         static_cast<std::size_t>(cfg_.slots + 1) +
                     static_cast<std::size_t>(n1));
}

PolicyTable value_iteration(const ScenarioConfig& cfg, ValueIterationStats* stats) {
  return value_iteration(TransitionKernel(cfg), stats);
}

PolicyTable value_iteration(const TransitionKernel& kernel, ValueIterationStats* stats) {
  // Values closer than this are treated as tied so the smallest n1 wins
  // regardless of summation-order noise.
  constexpr double kTie = 1e-12;
  const auto& cfg = kernel.config();
  const auto& states = kernel.states();
  PolicyTable table(cfg);
  std::vector<double> next_value(states.size(), 0.0);
  std::vector<double> value(states.size(), 0.0);
  long long evaluations = 0;

  for (int k = cfg.deadline - 1; k >= 0; --k) {
    for (std::size_t i = 0; i < states.size(); ++i) {
      double best = -1.0;
      int best_action = 0;
      for (int a = 0; a <= cfg.slots; ++a) {
        double q = kernel.reward(static_cast<int>(i), a);
        for (const auto& arc : kernel.arcs(static_cast<int>(i), a))
          q += arc.prob * next_value[static_cast<std::size_t>(arc.next)];
        ++evaluations;
        if (a == 0 || q > best + kTie) {
          best = q;
          best_action = a;
        }
      }
      value[i] = best;
      table.set(k, states[i], {best_action, best});
    }
    std::swap(value, next_value);
  }
  if (stats) stats->bellman_evaluations = evaluations;
  return table;
}

PolicyTable tabulate_policy(const TransitionKernel& kernel, const Policy& policy) {
  const auto& cfg = kernel.config();
  const auto& states = kernel.states();
  PolicyTable table(cfg);
  std::vector<double> next_value(states.size(), 0.0);
  std::vector<double> value(states.size(), 0.0);
  for (int k = cfg.deadline - 1; k >= 0; --k) {
    for (std::size_t i = 0; i < states.size(); ++i) {
      const int a = policy.action(cfg, k, states[i]);
      if (a < 0 || a > cfg.slots)
        throw ConfigError("policy returned n1=" + std::to_string(a) + " at epoch " +
                          std::to_string(k) + " state " + states[i].to_string());
      double q = kernel.reward(static_cast<int>(i), a);
      for (const auto& arc : kernel.arcs(static_cast<int>(i), a))
        q += arc.prob * next_value[static_cast<std::size_t>(arc.next)];
      value[i] = q;
      table.set(k, states[i], {a, q});
    }
    std::swap(value, next_value);
  }
  return table;
}

int baseline_policy(BaselineKind kind, const ScenarioConfig& cfg, QueueState state, int /*epoch*/) {
  const int n = cfg.slots;
  const int half_up = (n + 1) / 2;
  switch (kind) {
    case BaselineKind::max_weight:
      return state.q1 >= state.q2 ? n : 0;
    case BaselineKind::weighted_fair: {
      const int total = state.total();
      if (total == 0) return half_up;
      // floor(N q1 / total + 1/2) in integers.
      return (2 * n * state.q1 + total) / (2 * total);
    }
    case BaselineKind::backpressure: {
      const int w1 = state.q1 - state.q2;
      const int w2 = state.q2;
      if ((w1 <= 0 && w2 <= 0) || w1 == w2) return half_up;
      return w1 > w2 ? n : 0;
    }
    case BaselineKind::fifty_fifty:
      return half_up;
  }
  return half_up;
}

}  // namespace dvpsched
