// dvpsched: solve, evaluate and sweep slot schedules for the two-hop path.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "dvpsched/cli.hpp"
#include "dvpsched/format.hpp"

namespace {

void add_scenario_flags(CLI::App* cmd, dvpsched::ScenarioConfig& cfg) {
  cmd->add_option("--N", cfg.slots, "slots per frame")->required();
  cmd->add_option("--pe", cfg.p_error, "per-slot packet error rate")->required();
  cmd->add_option("--w", cfg.deadline, "deadline in frames")->required();
  cmd->add_option("--y", cfg.batch, "time-critical batch size")->capture_default_str();
  cmd->add_option("--x1", cfg.backlog1, "initial backlog at the source")->capture_default_str();
  cmd->add_option("--x2", cfg.backlog2, "initial backlog at the relay")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slot scheduling for deadline-constrained two-hop delivery"};
  app.require_subcommand(1);

  dvpsched::SolveRequest solve;
  std::string solve_out;
  auto* solve_cmd = app.add_subcommand("solve", "compute a schedule or a policy table");
  add_scenario_flags(solve_cmd, solve.config);
  solve_cmd->add_option("--method", solve.method, "policy name")->required();
  solve_cmd->add_option("--out", solve_out, "policy table destination (mdp and baselines)");

  dvpsched::EvalRequest eval;
  std::string eval_n1, eval_file, eval_method;
  unsigned long long eval_reps = 1'000'000;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate the DVP of a policy");
  add_scenario_flags(eval_cmd, eval.config);
  eval_cmd->add_option("--n1", eval_n1, "inline schedule, link-1 slots per frame (e.g. 2,2,3)");
  eval_cmd->add_option("--policy-file", eval_file, "policy table written by solve");
  eval_cmd->add_option("--method", eval_method, "policy name to solve and evaluate");
  eval_cmd->add_option("--evaluator", eval.evaluator, "exact, enum, dvpub, wtb or monte-carlo")
      ->capture_default_str();
  eval_cmd->add_option("--reps", eval_reps, "Monte Carlo replications")->capture_default_str();
  eval_cmd->add_option("--seed", eval.seed, "Monte Carlo seed")->capture_default_str();

  dvpsched::SweepRequest sweep;
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep and emit CSV");
  sweep_cmd->add_option("file", sweep.sweep_file, "sweep definition")->required();
  sweep_cmd->add_option("--out", sweep_out, "CSV destination (default standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dvpsched::kExitUsage;
  }

  if (*solve_cmd) {
    if (!solve_out.empty()) solve.out_path = solve_out;
    return dvpsched::cmd_solve(solve, std::cout, std::cerr);
  }
  if (*eval_cmd) {
    try {
      if (!eval_n1.empty()) eval.n1 = dvpsched::parse_int_list(eval_n1);
    } catch (const std::exception& e) {
      std::cerr << "invalid --n1: " << e.what() << '\n';
      return dvpsched::kExitUsage;
    }
    if (!eval_file.empty()) eval.policy_file = eval_file;
    if (!eval_method.empty()) eval.policy = eval_method;
    if (eval_reps < 1) {
      std::cerr << "--reps must be >= 1\n";
      return dvpsched::kExitUsage;
    }
    eval.replications = static_cast<long long>(eval_reps);
    return dvpsched::cmd_eval(eval, std::cout, std::cerr);
  }
  if (!sweep_out.empty()) sweep.out_path = sweep_out;
  return dvpsched::cmd_sweep(sweep, std::cout, std::cerr);
}
