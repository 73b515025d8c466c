#pragma once

// Semi-static schedules fixed at frame 0 from the initial backlogs.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dvpsched/analysis.hpp"
#include "dvpsched/core.hpp"

namespace dvpsched {

enum class SemiStaticMethod { wtb_r, wtb_w, wtb_d, e_wtb, e_dvpub, opt, fifty_fifty };

std::string_view to_string(SemiStaticMethod m);
std::optional<SemiStaticMethod> parse_semistatic(std::string_view name);

/// Selection criterion for neighbour and exhaustive searches.
enum class Criterion { dvpub, wtb, exact };

/// Continuous minimizer of WTB over the box [1, N-1]^w.
struct RelaxedSchedule {
  std::vector<double> n2;
  double s = 0.0;
  double objective = 0.0;
  int iterations = 0;
  double projected_gradient_norm = 0.0;
  bool converged = false;
};

struct SemiStaticResult {
  Schedule schedule;
  SemiStaticMethod method = SemiStaticMethod::fifty_fifty;
  double score = 0.0;  // value of the selection criterion
  std::optional<RelaxedSchedule> relaxed;
  std::size_t candidates = 0;  // schedules scored
};

struct RelaxedOptions {
  double gradient_tolerance = 1e-7;
  int max_iterations = 10000;
  double armijo = 1e-4;
};

/// Projected gradient on the box with exact s-minimization at every iterate,
/// started from the uniform split; backtracking (halving) Armijo steps.
RelaxedSchedule solve_relaxed(const ScenarioConfig& cfg, const RelaxedOptions& opts = {});

/// Projected gradient of WTB at (n2, s): zero on coordinates sitting at a
/// bound with the gradient pointing outward.
std::vector<double> projected_gradient(const ScenarioConfig& cfg, std::span<const double> n2,
                                       double s);

/// WTB-R: nearest integer per frame (halves round up), clamped to {1..N-1}.
SemiStaticResult round_nearest(const ScenarioConfig& cfg, const RelaxedSchedule& relaxed);

inline constexpr int kNeighbourFrameCap = 24;

/// WTB-D (criterion dvpub) / WTB-W (criterion wtb): best of the floor/ceil
/// combinations. Ties go to the lexicographically smallest n2.
SemiStaticResult neighbor_search(const ScenarioConfig& cfg, const RelaxedSchedule& relaxed,
                                 Criterion criterion, int frame_cap = kNeighbourFrameCap);

struct ExhaustiveOptions {
  double cap = 1e6;
  /// Search {0..N}^w instead of {1..N-1}^w (exact criterion only).
  bool full_domain = false;
};

/// eDVPUB / eWTB / OPT.
SemiStaticResult exhaustive(const ScenarioConfig& cfg, Criterion criterion,
                            const ExhaustiveOptions& opts = {});

/// ceil(N/2) slots to link 1 in every frame.
SemiStaticResult fifty_fifty(const ScenarioConfig& cfg);

/// Dispatch on the method name.
SemiStaticResult solve_semistatic(const ScenarioConfig& cfg, SemiStaticMethod method);

/// Criterion value of an integer schedule.
double score_schedule(const ScenarioConfig& cfg, const Schedule& schedule, Criterion criterion);

}  // namespace dvpsched
