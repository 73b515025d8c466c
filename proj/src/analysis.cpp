#include "dvpsched/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace dvpsched {

namespace {

// ln((1 - p) e^{-s} + p) without cancellation for small s.
double log_alpha(double p_error, double s) {
  // On a lossless channel alpha = e^{-s}; log1p would hit -inf once
  // expm1(-s) rounds to -1.
  if (p_error == 0.0) return -s;
  return std::log1p((1.0 - p_error) * std::expm1(-s));
}

// trials * ln(alpha), with an empty event contributing exactly zero.
double exponent(double trials, double la) { return trials == 0.0 ? 0.0 : trials * la; }

void check_allocation(const ScenarioConfig& cfg, std::span<const double> n2) {
  if (static_cast<int>(n2.size()) != cfg.deadline)
    throw DomainError("allocation has " + std::to_string(n2.size()) + " frames, expected w=" +
                      std::to_string(cfg.deadline));
  for (double v : n2) {
    if (!(v >= 0.0 && v <= cfg.slots))
      throw DomainError("link-2 allocation outside [0, N]");
  }
}

void check_schedule(const ScenarioConfig& cfg, const Schedule& schedule) {
  if (schedule.frames() != cfg.deadline)
    throw DomainError("schedule has " + std::to_string(schedule.frames()) +
                      " frames, expected w=" + std::to_string(cfg.deadline));
  if (schedule.slots() != cfg.slots)
    throw DomainError("schedule built for N=" + std::to_string(schedule.slots()) +
                      ", scenario has N=" + std::to_string(cfg.slots));
}

// log of sum_t exp(T_t ln(alpha) + s c_t).
double log_wtb(const std::vector<UnionEvent<double>>& events, double p_error, double s) {
  const double la = log_alpha(p_error, s);
  double peak = -std::numeric_limits<double>::infinity();
  for (const auto& e : events) peak = std::max(peak, exponent(e.trials, la) + s * e.threshold);
  double sum = 0.0;
  for (const auto& e : events) sum += std::exp(exponent(e.trials, la) + s * e.threshold - peak);
  return peak + std::log(sum);
}

}  // namespace

std::string_view to_string(EvalMethod m) {
  switch (m) {
    case EvalMethod::exact_chain: return "exact-chain";
    case EvalMethod::exact_enum: return "exact-enum";
    case EvalMethod::dvpub: return "dvpub";
    case EvalMethod::wtb: return "wtb";
    case EvalMethod::monte_carlo: return "monte-carlo";
  }
  return "?";
}

ChernoffParam::ChernoffParam(double s) : s_(s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("Chernoff exponent must be > 0");
}

double ChernoffParam::alpha(double p_error) const {
  return (1.0 - p_error) * std::exp(-s_) + p_error;
}

std::vector<UnionEvent<int>> union_events(const ScenarioConfig& cfg, const Schedule& schedule) {
  check_schedule(cfg, schedule);
  const int w = cfg.deadline;
  std::vector<UnionEvent<int>> events;
  events.reserve(static_cast<std::size_t>(w) + 1);
  events.push_back({cumulative_service_params(schedule, 2, w), cfg.total_load() - 1});
  for (int v = 1; v <= w; ++v) {
    const int trials =
        cumulative_service_params(schedule, 1, v - 1) + trailing_service_params(schedule, 2, w - v);
    events.push_back({trials, cfg.first_hop_load() - 1});
  }
  return events;
}

std::vector<UnionEvent<double>> union_events(const ScenarioConfig& cfg, std::span<const double> n2) {
  check_allocation(cfg, n2);
  const int w = cfg.deadline;
  std::vector<UnionEvent<double>> events;
  events.reserve(static_cast<std::size_t>(w) + 1);
  for (int v = 0; v <= w; ++v) {
    double trials = 0.0;
    for (int j = 0; j < w; ++j) {
      const int slope = union_event_slope(v, j);
      if (slope > 0) trials += n2[static_cast<std::size_t>(j)];
      else if (slope < 0) trials += cfg.slots - n2[static_cast<std::size_t>(j)];
    }
    events.push_back({trials, v == 0 ? cfg.total_load() - 1 : cfg.first_hop_load() - 1});
  }
  return events;
}

int union_event_slope(int event, int frame) {
  if (event == 0) return 1;
  if (frame <= event - 2) return -1;
  if (frame >= event) return 1;
  return 0;
}

EvalResult exact_dvp_chain(const ScenarioConfig& cfg, const Policy& policy) {
  cfg.validate();
  const int a = cfg.first_hop_load();
  const int width = cfg.total_load() + 1;
  const std::size_t cells = static_cast<std::size_t>((a + 1) * width);
  std::vector<double> mass(cells, 0.0);
  std::vector<double> next(cells, 0.0);
  const QueueState start = initial_state(cfg);
  mass[static_cast<std::size_t>(start.q1 * width + start.q2)] = 1.0;

  std::vector<std::vector<double>> rows;
  for (int n = 0; n <= cfg.slots; ++n) rows.push_back(binomial_row(n, cfg.p_success()));

  for (int k = 0; k < cfg.deadline; ++k) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int q1 = 0; q1 <= a; ++q1) {
      for (int q2 = 0; q2 < width; ++q2) {
        const double m = mass[static_cast<std::size_t>(q1 * width + q2)];
        if (m == 0.0) continue;
        const QueueState s{q1, q2};
        const int n1 = policy.action(cfg, k, s);
        if (n1 < 0 || n1 > cfg.slots)
          throw ConfigError("policy returned n1=" + std::to_string(n1) + " at epoch " +
                            std::to_string(k) + " state " + s.to_string());
        const auto& r1 = rows[static_cast<std::size_t>(n1)];
        const auto& r2 = rows[static_cast<std::size_t>(cfg.slots - n1)];
        for (int s1 = 0; s1 <= n1; ++s1) {
          const double m1 = m * r1[static_cast<std::size_t>(s1)];
          if (m1 == 0.0) continue;
          for (int s2 = 0; s2 <= cfg.slots - n1; ++s2) {
            const QueueState t = step_queues(s, s1, s2).next;
            next[static_cast<std::size_t>(t.q1 * width + t.q2)] += m1 * r2[static_cast<std::size_t>(s2)];
          }
        }
      }
    }
    std::swap(mass, next);
  }

  EvalResult out;
  out.method = EvalMethod::exact_chain;
  double violation = 0.0;
  double leftover = 0.0;
  for (int q1 = 0; q1 <= a; ++q1) {
    for (int q2 = 0; q2 < width; ++q2) {
      const double m = mass[static_cast<std::size_t>(q1 * width + q2)];
      if (q1 + q2 > 0) violation += m;
      leftover += m * (q1 + q2);
    }
  }
  out.dvp = violation;
  out.mean_departures = cfg.total_load() - leftover;
  return out;
}

double enumeration_size(const Schedule& schedule) {
  double count = 1.0;
  for (int k = 0; k < schedule.frames(); ++k)
    count *= static_cast<double>(schedule.n1(k) + 1) * static_cast<double>(schedule.n2(k) + 1);
  return count;
}

EvalResult exact_dvp_enum(const ScenarioConfig& cfg, const Schedule& schedule, double cap) {
  cfg.validate();
  check_schedule(cfg, schedule);
  const double size = enumeration_size(schedule);
  if (size > cap) throw CapExceeded("outcome enumeration", size, cap);

  const double ps = cfg.p_success();
  double violation = 0.0;
  double departures = 0.0;
  std::function<void(int, QueueState, double, int)> visit = [&](int k, QueueState s, double prob,
                                                                 int departed) {
    if (k == cfg.deadline) {
      if (!s.empty()) violation += prob;
      departures += prob * departed;
      return;
    }
    const int n1 = schedule.n1(k);
    const int n2 = schedule.n2(k);
    for (int s1 = 0; s1 <= n1; ++s1) {
      const double p1 = binomial_pmf(n1, ps, s1);
      if (p1 == 0.0) continue;
      for (int s2 = 0; s2 <= n2; ++s2) {
        const double p2 = binomial_pmf(n2, ps, s2);
        if (p2 == 0.0) continue;
        const auto step = step_queues(s, s1, s2);
        visit(k + 1, step.next, prob * p1 * p2, departed + step.outcome.d2);
      }
    }
  };
  visit(0, initial_state(cfg), 1.0, 0);

  EvalResult out;
  out.method = EvalMethod::exact_enum;
  out.dvp = violation;
  out.mean_departures = departures;
  return out;
}

EvalResult dvpub(const ScenarioConfig& cfg, const Schedule& schedule) {
  cfg.validate();
  EvalResult out;
  out.method = EvalMethod::dvpub;
  for (const auto& e : union_events(cfg, schedule)) {
    const double term = binomial_cdf_clamped(e.trials, cfg.p_success(), e.threshold);
    out.detail.push_back(term);
    out.dvp += term;
  }
  return out;
}

double wtb(const ScenarioConfig& cfg, std::span<const double> n2, ChernoffParam s) {
  cfg.validate();
  return std::exp(log_wtb(union_events(cfg, n2), cfg.p_error, s.value()));
}

double wtb(const ScenarioConfig& cfg, const Schedule& schedule, ChernoffParam s) {
  check_schedule(cfg, schedule);
  const auto n2 = schedule.n2_real();
  return wtb(cfg, n2, s);
}

std::vector<double> wtb_gradient(const ScenarioConfig& cfg, std::span<const double> n2,
                                 ChernoffParam s) {
  cfg.validate();
  const auto events = union_events(cfg, n2);
  const double la = log_alpha(cfg.p_error, s.value());
  std::vector<double> grad(n2.size(), 0.0);
  for (std::size_t v = 0; v < events.size(); ++v) {
    const double term = std::exp(exponent(events[v].trials, la) + s.value() * events[v].threshold);
    for (std::size_t j = 0; j < n2.size(); ++j)
      grad[j] += la * union_event_slope(static_cast<int>(v), static_cast<int>(j)) * term;
  }
  return grad;
}

WtbMinimum wtb_min_s(const ScenarioConfig& cfg, std::span<const double> n2) {
  cfg.validate();
  const auto events = union_events(cfg, n2);
  const auto f = [&](double s) { return log_wtb(events, cfg.p_error, s); };

  // Expand by doubling from the lower end until the objective turns up.
  double prev2 = kMinExponent, prev = kMinExponent;
  double f_prev = f(prev);
  double hi = kMinExponent;
  while (true) {
    const double cand = std::min(hi * 2.0, kMaxExponent);
    const double f_cand = f(cand);
    prev2 = prev;
    prev = hi;
    hi = cand;
    if (f_cand >= f_prev || cand >= kMaxExponent) break;
    f_prev = f_cand;
  }
  double lo = prev2;

  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > kExponentTolerance) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    }
  }
  WtbMinimum best{0.5 * (lo + hi), 0.0};
  double f_best = f(best.s);
  for (double edge : {lo, hi}) {
    const double fe = f(edge);
    if (fe < f_best) {
      f_best = fe;
      best.s = edge;
    }
  }
  best.value = std::exp(f_best);
  return best;
}

WtbMinimum wtb_min_s(const ScenarioConfig& cfg, const Schedule& schedule) {
  check_schedule(cfg, schedule);
  const auto n2 = schedule.n2_real();
  return wtb_min_s(cfg, n2);
}

}  // namespace dvpsched
