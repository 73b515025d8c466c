#pragma once

// Scenario, allocation and queue-state types for the two-hop lossy path,
// plus the Binomial service model and the single-frame queue update.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dvpsched/errors.hpp"

namespace dvpsched {

/// One problem instance: frame size, loss rate, deadline, batch and backlogs.
struct ScenarioConfig {
  int slots = 1;         // N, slots per frame
  double p_error = 0.0;  // p_e, per-slot packet error rate
  int deadline = 1;      // w, frames
  int batch = 1;         // y, time-critical packets arriving at frame 0
  int backlog1 = 0;      // x1
  int backlog2 = 0;      // x2

  /// Throws DomainError when any field is out of range.
  void validate() const;

  /// y + x1, the initial content of queue 1.
  int first_hop_load() const { return batch + backlog1; }
  /// L = y + x1 + x2.
  int total_load() const { return batch + backlog1 + backlog2; }
  double p_success() const { return 1.0 - p_error; }

  std::string to_string() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Per-frame slot split. Stores the link-1 allocation n1[k]; n2[k] = N - n1[k].
class Schedule {
 public:
  Schedule() = default;

  static Schedule from_n1(int slots, std::vector<int> n1);
  static Schedule from_n2(int slots, std::span<const int> n2);
  /// Constant allocation of `n1` link-1 slots in each of `frames` frames.
  static Schedule uniform(int slots, int frames, int n1);

  int slots() const { return slots_; }
  int frames() const { return static_cast<int>(n1_.size()); }
  int n1(int frame) const { return n1_.at(static_cast<std::size_t>(frame)); }
  int n2(int frame) const { return slots_ - n1(frame); }
  int slots_for(int link, int frame) const;

  const std::vector<int>& n1_vector() const { return n1_; }
  std::vector<int> n2_vector() const;
  std::vector<double> n2_real() const;

  /// Every n2 entry lies in {1..N-1}.
  bool in_bound_domain() const;

  /// Comma separated n1 entries, e.g. "2,2,3".
  std::string to_string() const;

  friend bool operator==(const Schedule&, const Schedule&) = default;

 private:
  Schedule(int slots, std::vector<int> n1) : slots_(slots), n1_(std::move(n1)) {}

  int slots_ = 0;
  std::vector<int> n1_;
};

struct QueueState {
  int q1 = 0;
  int q2 = 0;

  int total() const { return q1 + q2; }
  bool empty() const { return q1 == 0 && q2 == 0; }
  std::string to_string() const;

  friend auto operator<=>(const QueueState&, const QueueState&) = default;
};

/// Granted service and resulting departures of one frame.
struct FrameOutcome {
  int s1 = 0;
  int s2 = 0;
  int d1 = 0;
  int d2 = 0;
};

struct StepResult {
  QueueState next;
  FrameOutcome outcome;
};

/// Queue state at frame 0: (y + x1, x2).
inline QueueState initial_state(const ScenarioConfig& cfg) {
  return {cfg.first_hop_load(), cfg.backlog2};
}

/// C(n, r) p^r (1-p)^(n-r), evaluated through log-gamma.
double binomial_pmf(int n, double p, int r);

/// P{Bin(n, p) <= r}. Unlike the pmf, r outside {0..n} is rejected too.
double binomial_cdf(int n, double p, int r);

/// Whole pmf row {pmf(n, p, 0) .. pmf(n, p, n)}.
std::vector<double> binomial_row(int n, double p);

/// Tail-safe threshold form used by the union bound: P{Bin(n, p) <= c}
/// for any integer c (0 when c < 0, 1 when c >= n).
double binomial_cdf_clamped(int n, double p, int c);

/// One frame of the tandem: queue 1 forwards min(q1, s1) packets that join
/// queue 2 for the next frame; queue 2 serves min(q2, s2).
StepResult step_queues(QueueState state, int s1, int s2);

/// Trial count of S^link(k): sum of link slots over frames 0..k-1.
int cumulative_service_params(const Schedule& schedule, int link, int frames);

/// Sum of link slots over the last `frames` frames, i.e. frames w-k..w-1.
int trailing_service_params(const Schedule& schedule, int link, int frames);

}  // namespace dvpsched
