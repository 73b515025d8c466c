#pragma once

// Finite-horizon MDP over the joint backlog (q1, q2): state space,
// per-action transition kernel, expected-departure reward, backward value
// iteration, and the queue-state baselines (MW, WFQ, BP, 50/50).
//
// The MDP maximizes E[D(w)] rather than minimizing the DVP directly. DVP is
// P{L - D(w) >= 1}; a Markov-type bound on that tail motivates pushing the
// expected throughput up, but the bound itself is not computed here because
// it is undefined on the event D(w) = 0.

#include <utility>
#include <vector>

#include "dvpsched/core.hpp"
#include "dvpsched/policy.hpp"

namespace dvpsched {

/// Sparse next-state distribution, sorted by state.
using StateDistribution = std::vector<std::pair<QueueState, double>>;

/// Full rectangle {0..y+x1} x {0..y+x1+x2}.
std::vector<QueueState> build_state_space(const ScenarioConfig& cfg);

/// Subset of the rectangle with q1 + q2 <= L. It contains the initial state
/// and is closed under transitions, so the value recursion runs over it.
std::vector<QueueState> feasible_states(const ScenarioConfig& cfg);

/// One-frame kernel by marginalizing step_queues over
/// s1 ~ Bin(n1, 1-p_e) and s2 ~ Bin(N-n1, 1-p_e).
StateDistribution transition_probs(const ScenarioConfig& cfg, QueueState state, int n1);

/// Same kernel assembled case by case from the queue-length differences
/// (no growth, interior, queue 1 drained, queue 2 drained, empty-queue
/// proviso). Kept as an independent route for cross-checking.
StateDistribution transition_probs_cases(const ScenarioConfig& cfg, QueueState state, int n1);

/// E[min(q2, s2)] with s2 ~ Bin(N-n1, 1-p_e).
double reward(const ScenarioConfig& cfg, QueueState state, int n1);

class TransitionKernel {
 public:
  explicit TransitionKernel(const ScenarioConfig& cfg);

  const ScenarioConfig& config() const { return cfg_; }
  const std::vector<QueueState>& states() const { return states_; }
  int index_of(QueueState s) const;

  struct Arc {
    int next;  // index into states()
    double prob;
  };
  const std::vector<Arc>& arcs(int state_index, int n1) const;
  double reward(int state_index, int n1) const;

 private:
  ScenarioConfig cfg_;
  std::vector<QueueState> states_;
  std::vector<int> index_;  // (q1, q2) -> position, -1 when outside the set
  std::vector<std::vector<Arc>> arcs_;
  std::vector<double> rewards_;
};

struct ValueIterationStats {
  long long bellman_evaluations = 0;  // (state, action, epoch) triples
};

/// Backward recursion from J_w = 0; ties go to the smallest n1.
PolicyTable value_iteration(const ScenarioConfig& cfg, ValueIterationStats* stats = nullptr);
PolicyTable value_iteration(const TransitionKernel& kernel, ValueIterationStats* stats = nullptr);

/// Actions of `policy` on every feasible state and epoch, with the expected
/// departures still to come under that policy as the value column.
PolicyTable tabulate_policy(const TransitionKernel& kernel, const Policy& policy);

/// Queue-state baselines. MW: all slots to the longer queue, ties upstream.
/// WFQ: round(N q1 / (q1 + q2)) half-up, (0,0) -> ceil(N/2). BP: weights
/// (q1 - q2, q2), all slots to the heavier link, ties or (0,0) -> ceil(N/2).
/// fifty: ceil(N/2).
int baseline_policy(BaselineKind kind, const ScenarioConfig& cfg, QueueState state, int epoch);

}  // namespace dvpsched
