#include "dvpsched/policy.hpp"

#include <sstream>

#include "dvpsched/dynamic.hpp"
#include "dvpsched/format.hpp"

namespace dvpsched {

namespace {

constexpr std::string_view kTableMagic = "policy-table";

ScenarioConfig parse_header(std::string_view line, std::size_t line_no) {
  std::istringstream is{std::string(line)};
  std::string word;
  is >> word;
  if (word != kTableMagic) throw ParseError(line_no, "expected 'policy-table' header");
  ScenarioConfig cfg;
  bool seen[6] = {};
  while (is >> word) {
    const auto eq = word.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key=value, got '" + word + "'");
    const std::string key = word.substr(0, eq);
    const std::string val = word.substr(eq + 1);
    bool ok = false;
    if (key == "N") ok = parse_int(val, cfg.slots), seen[0] = true;
    else if (key == "pe") ok = parse_double(val, cfg.p_error), seen[1] = true;
    else if (key == "w") ok = parse_int(val, cfg.deadline), seen[2] = true;
    else if (key == "y") ok = parse_int(val, cfg.batch), seen[3] = true;
    else if (key == "x1") ok = parse_int(val, cfg.backlog1), seen[4] = true;
    else if (key == "x2") ok = parse_int(val, cfg.backlog2), seen[5] = true;
    else throw ParseError(line_no, "unknown header key '" + key + "'");
    if (!ok) throw ParseError(line_no, "bad value for '" + key + "': '" + val + "'");
  }
  for (bool s : seen)
    if (!s) throw ParseError(line_no, "header must define N, pe, w, y, x1, x2");
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw ParseError(line_no, e.what());
  }
  return cfg;
}

}  // namespace

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::max_weight: return "mw";
    case BaselineKind::weighted_fair: return "wfq";
    case BaselineKind::backpressure: return "bp";
    case BaselineKind::fifty_fifty: return "fifty";
  }
  return "?";
}

std::optional<BaselineKind> parse_baseline(std::string_view name) {
  if (name == "mw") return BaselineKind::max_weight;
  if (name == "wfq") return BaselineKind::weighted_fair;
  if (name == "bp") return BaselineKind::backpressure;
  if (name == "fifty") return BaselineKind::fifty_fifty;
  return std::nullopt;
}

PolicyTable::PolicyTable(ScenarioConfig config)
    : config_(config), rows_(static_cast<std::size_t>(config.deadline)) {}

void PolicyTable::set(int epoch, QueueState state, Entry entry) {
  if (epoch < 0 || epoch >= epochs()) throw DomainError("epoch out of range");
  rows_[static_cast<std::size_t>(epoch)][state] = entry;
}

std::optional<PolicyTable::Entry> PolicyTable::find(int epoch, QueueState state) const {
  if (epoch < 0 || epoch >= epochs()) return std::nullopt;
  const auto& rows = rows_[static_cast<std::size_t>(epoch)];
  auto it = rows.find(state);
  if (it == rows.end()) return std::nullopt;
  return it->second;
}

std::optional<int> PolicyTable::action(int epoch, QueueState state) const {
  auto e = find(epoch, state);
  if (!e) return std::nullopt;
  return e->action;
}

std::optional<double> PolicyTable::value(int epoch, QueueState state) const {
  if (epoch == epochs()) return 0.0;
  auto e = find(epoch, state);
  if (!e) return std::nullopt;
  return e->value;
}

const std::map<QueueState, PolicyTable::Entry>& PolicyTable::epoch_rows(int epoch) const {
  return rows_.at(static_cast<std::size_t>(epoch));
}

std::size_t PolicyTable::size() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.size();
  return n;
}

void PolicyTable::write(std::ostream& os) const {
  os << kTableMagic << ' ' << config_.to_string() << '\n';
  os << "# epoch q1 q2 action value\n";
  for (int k = 0; k < epochs(); ++k) {
    for (const auto& [state, entry] : rows_[static_cast<std::size_t>(k)]) {
      os << k << ' ' << state.q1 << ' ' << state.q2 << ' ' << entry.action << ' '
         << format_value12(entry.value) << '\n';
    }
  }
}

PolicyTable PolicyTable::read(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<PolicyTable> table;
  while (std::getline(is, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (!table) {
      table.emplace(parse_header(body, line_no));
      continue;
    }
    std::istringstream row{std::string(body)};
    std::string tok[5];
    for (auto& t : tok) {
      if (!(row >> t)) throw ParseError(line_no, "expected 'epoch q1 q2 action value'");
    }
    std::string extra;
    if (row >> extra) throw ParseError(line_no, "trailing field '" + extra + "'");
    int epoch = 0, q1 = 0, q2 = 0, action = 0;
    double value = 0.0;
    if (!parse_int(tok[0], epoch) || !parse_int(tok[1], q1) || !parse_int(tok[2], q2) ||
        !parse_int(tok[3], action) || !parse_double(tok[4], value))
      throw ParseError(line_no, "non-numeric field in row");
    if (epoch < 0 || epoch >= table->epochs())
      throw ParseError(line_no, "epoch " + std::to_string(epoch) + " outside {0.." +
                                    std::to_string(table->epochs() - 1) + "}");
    if (q1 < 0 || q2 < 0) throw ParseError(line_no, "negative queue length");
    if (action < 0 || action > table->config().slots)
      throw ParseError(line_no, "action " + std::to_string(action) + " outside {0.." +
                                    std::to_string(table->config().slots) + "}");
    table->set(epoch, {q1, q2}, {action, value});
  }
  if (!table) throw ParseError(line_no == 0 ? 1 : line_no, "missing 'policy-table' header");
  return *table;
}

int Policy::action(const ScenarioConfig& cfg, int epoch, QueueState state) const {
  return std::visit(
      [&](const auto& src) -> int {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, Schedule>) {
          if (epoch < 0 || epoch >= src.frames())
            throw ConfigError("schedule has " + std::to_string(src.frames()) +
                              " frames, no action for epoch " + std::to_string(epoch));
          if (src.slots() != cfg.slots)
            throw ConfigError("schedule built for N=" + std::to_string(src.slots()) +
                              " used with N=" + std::to_string(cfg.slots));
          return src.n1(epoch);
        } else if constexpr (std::is_same_v<T, PolicyTable>) {
          auto a = src.action(epoch, state);
          if (!a)
            throw ConfigError("policy table has no action for epoch " + std::to_string(epoch) +
                              " state " + state.to_string());
          if (*a > cfg.slots) throw ConfigError("policy action exceeds N");
          return *a;
        } else {
          return baseline_policy(src, cfg, state, epoch);
        }
      },
      source_);
}

std::string Policy::describe() const {
  return std::visit(
      [](const auto& src) -> std::string {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, Schedule>) return "schedule n1=" + src.to_string();
        else if constexpr (std::is_same_v<T, PolicyTable>) return "policy-table";
        else return std::string(to_string(src));
      },
      source_);
}

}  // namespace dvpsched
