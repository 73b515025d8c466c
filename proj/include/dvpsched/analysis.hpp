#pragma once

// Delay violation probability of the time-critical batch: exact values
// (forward propagation of the queue-state distribution, brute-force outcome
// enumeration) and the union (DVPUB) and Chernoff (WTB) upper bounds.
//
// Violation happens iff one of w+1 cumulative-service events occurs
// (v = 0..w, frames indexed 0..w-1, a = y + x1, L = a + x2):
//   v = 0:  link-2 service over frames 0..w-1          < L
//   v >= 1: link-1 service over frames 0..v-2
//           + link-2 service over frames v..w-1        < a
// This follows from the tandem departure recursion
// D(w) = min_v [x2 + D1(v-1) + S2[v, w)], with a one-frame relay delay.
// Both links share the success probability 1 - p_e, so every event is a
// single Binomial tail and the bounds need no convolutions.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dvpsched/core.hpp"
#include "dvpsched/policy.hpp"

namespace dvpsched {

enum class EvalMethod { exact_chain, exact_enum, dvpub, wtb, monte_carlo };

std::string_view to_string(EvalMethod m);

struct EvalResult {
  double dvp = 0.0;  // bounds are kept unclamped
  EvalMethod method = EvalMethod::exact_chain;
  std::vector<double> detail;                   // per-event terms for bounds
  std::optional<double> mean_departures;        // E[D(w)] when the evaluator tracks it

  double clamped() const { return dvp < 1.0 ? dvp : 1.0; }
};

/// Chernoff exponent s > 0.
class ChernoffParam {
 public:
  explicit ChernoffParam(double s);
  double value() const { return s_; }
  /// (1 - p_e) e^{-s} + p_e, the per-slot Mellin factor.
  double alpha(double p_error) const;
  /// y + x1 - 1, the threshold shared by the v >= 1 events.
  static int beta(const ScenarioConfig& cfg) { return cfg.first_hop_load() - 1; }

 private:
  double s_;
};

/// One union event: P{Bin(trials, 1 - p_e) <= threshold}.
template <typename Count>
struct UnionEvent {
  Count trials;
  int threshold;
};

/// Event set for an integer schedule.
std::vector<UnionEvent<int>> union_events(const ScenarioConfig& cfg, const Schedule& schedule);

/// Event set for a real-valued link-2 allocation n2 in [0, N]^w; link-1
/// counts are N - n2.
std::vector<UnionEvent<double>> union_events(const ScenarioConfig& cfg, std::span<const double> n2);

/// d(trials of event v) / d(n2[j]): +1, -1 or 0.
int union_event_slope(int event, int frame);

/// Exact DVP by propagating the joint backlog distribution through w frames
/// under any policy. Also reports E[D(w)] via D(w) = L - q1_w - q2_w.
EvalResult exact_dvp_chain(const ScenarioConfig& cfg, const Policy& policy);

/// Brute-force enumeration of all per-frame service outcomes.
inline constexpr double kDefaultEnumerationCap = 1e7;
EvalResult exact_dvp_enum(const ScenarioConfig& cfg, const Schedule& schedule,
                          double cap = kDefaultEnumerationCap);
/// Number of joint outcomes exact_dvp_enum would visit.
double enumeration_size(const Schedule& schedule);

/// Union bound; `detail` holds the w+1 event probabilities.
EvalResult dvpub(const ScenarioConfig& cfg, const Schedule& schedule);

/// Chernoff bound at a fixed s; accepts real-valued allocations.
double wtb(const ScenarioConfig& cfg, std::span<const double> n2, ChernoffParam s);
double wtb(const ScenarioConfig& cfg, const Schedule& schedule, ChernoffParam s);

/// Gradient of wtb(n2, s) with respect to n2 at fixed s.
std::vector<double> wtb_gradient(const ScenarioConfig& cfg, std::span<const double> n2,
                                 ChernoffParam s);

struct WtbMinimum {
  double s = 0.0;
  double value = 0.0;
};

/// Search bracket for the exponent; the objective is convex in s and
/// flattens once alpha saturates at p_e.
inline constexpr double kMinExponent = 1e-6;
inline constexpr double kMaxExponent = 50.0;
inline constexpr double kExponentTolerance = 1e-9;

/// min over s > 0 of wtb, by bracket expansion then golden-section search.
WtbMinimum wtb_min_s(const ScenarioConfig& cfg, std::span<const double> n2);
WtbMinimum wtb_min_s(const ScenarioConfig& cfg, const Schedule& schedule);

}  // namespace dvpsched
