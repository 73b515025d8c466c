#include "dvpsched/semistatic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dvpsched/parallel.hpp"

namespace dvpsched {

namespace {

void require_bound_domain(const ScenarioConfig& cfg) {
  if (cfg.slots < 2)
    throw InfeasibleError("link-2 allocations in {1..N-1} need N >= 2, got N=" +
                          std::to_string(cfg.slots));
}

double clamp_box(double v, const ScenarioConfig& cfg) {
  return std::clamp(v, 1.0, static_cast<double>(cfg.slots - 1));
}

// Smallest index whose score is within a relative 1e-12 of the minimum, so
// the winner does not depend on evaluation order or summation noise.
std::size_t lexicographic_argmin(const std::vector<double>& scores) {
  const double best = *std::min_element(scores.begin(), scores.end());
  const double slack = 1e-12 * std::abs(best);
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i] <= best + slack) return i;
  return 0;
}

// Decodes candidate `index` of a mixed-radix product; the first frame is
// the most significant digit so increasing index is lexicographic order.
std::vector<int> decode(std::size_t index, const std::vector<std::vector<int>>& choices) {
  std::vector<int> out(choices.size());
  for (std::size_t j = choices.size(); j-- > 0;) {
    const auto radix = choices[j].size();
    out[j] = choices[j][index % radix];
    index /= radix;
  }
  return out;
}

SemiStaticResult search_product(const ScenarioConfig& cfg,
                                const std::vector<std::vector<int>>& choices,
                                Criterion criterion, SemiStaticMethod method) {
  std::size_t count = 1;
  for (const auto& c : choices) count *= c.size();
  std::vector<double> scores(count);
  parallel_for(count, [&](std::size_t i) {
    const auto n2 = decode(i, choices);
    scores[i] = score_schedule(cfg, Schedule::from_n2(cfg.slots, n2), criterion);
  });
  const auto best = lexicographic_argmin(scores);
  SemiStaticResult out;
  out.schedule = Schedule::from_n2(cfg.slots, decode(best, choices));
  out.method = method;
  out.score = scores[best];
  out.candidates = count;
  return out;
}

}  // namespace

std::string_view to_string(SemiStaticMethod m) {
  switch (m) {
    case SemiStaticMethod::wtb_r: return "wtb-r";
    case SemiStaticMethod::wtb_w: return "wtb-w";
    case SemiStaticMethod::wtb_d: return "wtb-d";
    case SemiStaticMethod::e_wtb: return "e-wtb";
    case SemiStaticMethod::e_dvpub: return "e-dvpub";
    case SemiStaticMethod::opt: return "opt";
    case SemiStaticMethod::fifty_fifty: return "fifty";
  }
  return "?";
}

std::optional<SemiStaticMethod> parse_semistatic(std::string_view name) {
  for (auto m : {SemiStaticMethod::wtb_r, SemiStaticMethod::wtb_w, SemiStaticMethod::wtb_d,
                 SemiStaticMethod::e_wtb, SemiStaticMethod::e_dvpub, SemiStaticMethod::opt,
                 SemiStaticMethod::fifty_fifty})
    if (to_string(m) == name) return m;
  return std::nullopt;
}

double score_schedule(const ScenarioConfig& cfg, const Schedule& schedule, Criterion criterion) {
  switch (criterion) {
    case Criterion::dvpub: return dvpub(cfg, schedule).dvp;
    case Criterion::wtb: return wtb_min_s(cfg, schedule).value;
    case Criterion::exact: return exact_dvp_chain(cfg, Policy(schedule)).dvp;
  }
  return std::numeric_limits<double>::infinity();
}

std::vector<double> projected_gradient(const ScenarioConfig& cfg, std::span<const double> n2,
                                       double s) {
  auto g = wtb_gradient(cfg, n2, ChernoffParam(s));
  const double lo = 1.0, hi = cfg.slots - 1.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (n2[j] <= lo && g[j] > 0.0) g[j] = 0.0;
    if (n2[j] >= hi && g[j] < 0.0) g[j] = 0.0;
  }
  return g;
}

RelaxedSchedule solve_relaxed(const ScenarioConfig& cfg, const RelaxedOptions& opts) {
  cfg.validate();
  require_bound_domain(cfg);
  const auto w = static_cast<std::size_t>(cfg.deadline);

  // The search runs on log WTB, which has the same minimizers and stays
  // well scaled when the bound is tiny; gradients are divided accordingly.
  std::vector<double> x(w, clamp_box(cfg.slots / 2.0, cfg));
  auto at = wtb_min_s(cfg, x);
  double phi = std::log(at.value);
  double step = 1.0;

  RelaxedSchedule out;
  for (int it = 0; it < opts.max_iterations; ++it) {
    auto pg = projected_gradient(cfg, x, at.s);
    for (auto& v : pg) v /= at.value;
    const double norm = std::sqrt(std::inner_product(pg.begin(), pg.end(), pg.begin(), 0.0));
    out.iterations = it;
    out.projected_gradient_norm = norm;
    if (norm < opts.gradient_tolerance) {
      out.converged = true;
      break;
    }
    const auto grad = wtb_gradient(cfg, x, ChernoffParam(at.s));

    bool accepted = false;
    step = std::min(step * 2.0, 1e6);
    while (step > 1e-16) {
      std::vector<double> trial(w);
      double decrease = 0.0;
      for (std::size_t j = 0; j < w; ++j) {
        trial[j] = clamp_box(x[j] - step * grad[j] / at.value, cfg);
        decrease += grad[j] / at.value * (trial[j] - x[j]);
      }
      const auto trial_at = wtb_min_s(cfg, trial);
      const double trial_phi = std::log(trial_at.value);
      // Small absolute allowance keeps roundoff from stalling the last steps.
      if (trial_phi <= phi + opts.armijo * decrease + 1e-15 * std::abs(phi) &&
          trial_phi <= phi) {
        x = std::move(trial);
        at = trial_at;
        phi = trial_phi;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No descent left at machine precision.
      out.converged = norm < 1e3 * opts.gradient_tolerance;
      break;
    }
  }
  out.n2 = std::move(x);
  out.s = at.s;
  out.objective = at.value;
  return out;
}

SemiStaticResult round_nearest(const ScenarioConfig& cfg, const RelaxedSchedule& relaxed) {
  require_bound_domain(cfg);
  std::vector<int> n2(relaxed.n2.size());
  for (std::size_t j = 0; j < n2.size(); ++j) {
    const double r = std::floor(relaxed.n2[j] + 0.5);
    n2[j] = static_cast<int>(std::clamp(r, 1.0, cfg.slots - 1.0));
  }
  SemiStaticResult out;
  out.schedule = Schedule::from_n2(cfg.slots, n2);
  out.method = SemiStaticMethod::wtb_r;
  out.score = wtb_min_s(cfg, out.schedule).value;
  out.relaxed = relaxed;
  out.candidates = 1;
  return out;
}

SemiStaticResult neighbor_search(const ScenarioConfig& cfg, const RelaxedSchedule& relaxed,
                                 Criterion criterion, int frame_cap) {
  require_bound_domain(cfg);
  if (criterion == Criterion::exact) throw DomainError("neighbour search scores with dvpub or wtb");
  std::vector<std::vector<int>> choices;
  double count = 1.0;
  for (double v : relaxed.n2) {
    const double snapped = std::abs(v - std::round(v)) < 1e-9 ? std::round(v) : v;
    const int lo = static_cast<int>(std::clamp(std::floor(snapped), 1.0, cfg.slots - 1.0));
    const int hi = static_cast<int>(std::clamp(std::ceil(snapped), 1.0, cfg.slots - 1.0));
    choices.push_back(lo == hi ? std::vector<int>{lo} : std::vector<int>{lo, hi});
    count *= static_cast<double>(choices.back().size());
  }
  if (static_cast<int>(relaxed.n2.size()) > frame_cap)
    throw CapExceeded("floor/ceil neighbourhood", count, std::ldexp(1.0, frame_cap));
  auto out = search_product(cfg, choices, criterion,
                            criterion == Criterion::wtb ? SemiStaticMethod::wtb_w
                                                        : SemiStaticMethod::wtb_d);
  out.relaxed = relaxed;
  return out;
}

SemiStaticResult exhaustive(const ScenarioConfig& cfg, Criterion criterion,
                            const ExhaustiveOptions& opts) {
  cfg.validate();
  if (!opts.full_domain) require_bound_domain(cfg);
  std::vector<int> values;
  for (int v = opts.full_domain ? 0 : 1; v <= (opts.full_domain ? cfg.slots : cfg.slots - 1); ++v)
    values.push_back(v);
  const double count = std::pow(static_cast<double>(values.size()), cfg.deadline);
  if (count > opts.cap) throw CapExceeded("exhaustive schedule search", count, opts.cap);
  const std::vector<std::vector<int>> choices(static_cast<std::size_t>(cfg.deadline), values);
  const auto method = criterion == Criterion::dvpub ? SemiStaticMethod::e_dvpub
                      : criterion == Criterion::wtb ? SemiStaticMethod::e_wtb
                                                    : SemiStaticMethod::opt;
  return search_product(cfg, choices, criterion, method);
}

SemiStaticResult fifty_fifty(const ScenarioConfig& cfg) {
  cfg.validate();
  SemiStaticResult out;
  out.schedule = Schedule::uniform(cfg.slots, cfg.deadline, (cfg.slots + 1) / 2);
  out.method = SemiStaticMethod::fifty_fifty;
  out.score = exact_dvp_chain(cfg, Policy(out.schedule)).dvp;
  out.candidates = 1;
  return out;
}

SemiStaticResult solve_semistatic(const ScenarioConfig& cfg, SemiStaticMethod method) {
  switch (method) {
    case SemiStaticMethod::wtb_r: return round_nearest(cfg, solve_relaxed(cfg));
    case SemiStaticMethod::wtb_w: return neighbor_search(cfg, solve_relaxed(cfg), Criterion::wtb);
    case SemiStaticMethod::wtb_d: return neighbor_search(cfg, solve_relaxed(cfg), Criterion::dvpub);
    case SemiStaticMethod::e_wtb: return exhaustive(cfg, Criterion::wtb);
    case SemiStaticMethod::e_dvpub: return exhaustive(cfg, Criterion::dvpub);
    case SemiStaticMethod::opt: return exhaustive(cfg, Criterion::exact);
    case SemiStaticMethod::fifty_fifty: return fifty_fifty(cfg);
  }
  throw DomainError("unknown semi-static method");
}

}  // namespace dvpsched
