#pragma once

// Policies that pick the link-1 allocation n1 for a frame: a fixed
// semi-static schedule, a precomputed MDP table, or a queue-state baseline.

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dvpsched/core.hpp"

namespace dvpsched {

enum class BaselineKind { max_weight, weighted_fair, backpressure, fifty_fifty };

std::string_view to_string(BaselineKind kind);
std::optional<BaselineKind> parse_baseline(std::string_view name);

/// Epoch-indexed action and value-to-go table of a dynamic policy.
class PolicyTable {
 public:
  struct Entry {
    int action = 0;
    double value = 0.0;
  };

  PolicyTable() = default;
  explicit PolicyTable(ScenarioConfig config);

  const ScenarioConfig& config() const { return config_; }
  int epochs() const { return config_.deadline; }

  void set(int epoch, QueueState state, Entry entry);
  std::optional<Entry> find(int epoch, QueueState state) const;
  std::optional<int> action(int epoch, QueueState state) const;
  /// J_epoch(state); J_w is identically zero.
  std::optional<double> value(int epoch, QueueState state) const;

  const std::map<QueueState, Entry>& epoch_rows(int epoch) const;
  std::size_t size() const;

  /// Header line with the scenario, then "epoch q1 q2 action value" rows
  /// with values at 12 significant digits.
  void write(std::ostream& os) const;
  /// Throws ParseError carrying the offending line number.
  static PolicyTable read(std::istream& is);

 private:
  ScenarioConfig config_;
  std::vector<std::map<QueueState, Entry>> rows_;
};

/// Any of the three policy sources, queried frame by frame.
class Policy {
 public:
  Policy(Schedule schedule) : source_(std::move(schedule)) {}          // NOLINT
  Policy(PolicyTable table) : source_(std::move(table)) {}             // NOLINT
  Policy(BaselineKind kind) : source_(kind) {}                         // NOLINT

  /// Link-1 slots at `epoch` in `state`; throws ConfigError when the policy
  /// has no entry there.
  int action(const ScenarioConfig& cfg, int epoch, QueueState state) const;

  std::string describe() const;

  const Schedule* schedule() const { return std::get_if<Schedule>(&source_); }
  const PolicyTable* table() const { return std::get_if<PolicyTable>(&source_); }

 private:
  std::variant<Schedule, PolicyTable, BaselineKind> source_;
};

}  // namespace dvpsched
