#pragma once

// Front-end plumbing behind the dvpsched tool: policy names, sweep files,
// CSV rows, and the solve / eval / sweep commands as testable functions.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dvpsched/core.hpp"
#include "dvpsched/policy.hpp"

namespace dvpsched {

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitInfeasible = 3, kExitCellFailure = 4 };

/// Every policy name the tool accepts, sorted.
const std::vector<std::string>& policy_names();
bool is_policy_name(std::string_view name);

/// Builds the policy `name` for one scenario: semi-static methods are
/// solved, "mdp" runs value iteration, baselines are returned as is.
Policy resolve_policy(const ScenarioConfig& cfg, std::string_view name);

struct Evaluator {
  enum class Kind { exact, monte_carlo };
  Kind kind = Kind::exact;
  long long replications = 1'000'000;
  std::uint64_t seed = 1;
};

/// States the exact chain may track before it refuses.
inline constexpr double kChainStateCap = 1e7;

struct SweepSpec {
  std::vector<int> x1{0};
  std::vector<int> x2{0};
  std::vector<int> w{2};
  std::vector<int> slots{4};
  std::vector<double> p_error{0.2};
  std::vector<int> y{1};
  /// Explicit (x1, x2) pairs; replaces the x1 x x2 product when set.
  std::vector<std::pair<int, int>> backlogs;
  std::vector<std::string> policies;
  Evaluator evaluator;
  bool timing = true;
  unsigned threads = 0;

  /// Cross product in CSV order (x1, x2, w, N, pe, y), sorted.
  std::vector<ScenarioConfig> configs() const;
};

/// Flat "key = value" lines; lists separated by commas, integer ranges as
/// "a..b", '#' starts a comment. Throws ParseError with the line number.
SweepSpec parse_sweep(std::istream& is);

struct SweepRow {
  ScenarioConfig config;
  std::string policy;
  std::optional<double> dvp;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::optional<double> ms;
  std::string error;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// Orders rows by (x1, x2, w, N, pe, y, policy).
bool row_less(const SweepRow& a, const SweepRow& b);

/// Header x1,x2,w,N,pe,y,policy,dvp,ci_low,ci_high,ms, plus a trailing
/// error column when any row failed.
void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);
/// Inverse of write_csv; throws ParseError with the line number.
std::vector<SweepRow> read_csv(std::istream& is);

/// One (config, policy) cell; failures are captured in `error`.
SweepRow run_cell(const ScenarioConfig& cfg, const std::string& policy, const Evaluator& evaluator,
                  bool timing);

/// All cells in a work pool, returned in row_less order.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

struct SolveRequest {
  ScenarioConfig config;
  std::string method;
  std::optional<std::string> out_path;
};

struct EvalRequest {
  ScenarioConfig config;
  std::optional<std::vector<int>> n1;        // inline schedule
  std::optional<std::string> policy_file;
  std::optional<std::string> policy;         // any name from policy_names()
  std::string evaluator = "exact";           // exact | enum | dvpub | wtb | monte-carlo
  long long replications = 1'000'000;
  std::uint64_t seed = 1;
};

struct SweepRequest {
  std::string sweep_file;
  std::optional<std::string> out_path;
};

int cmd_solve(const SolveRequest& req, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalRequest& req, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepRequest& req, std::ostream& out, std::ostream& err);

}  // namespace dvpsched
