#include "dvpsched/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "dvpsched/analysis.hpp"
#include "dvpsched/dynamic.hpp"
#include "dvpsched/format.hpp"
#include "dvpsched/parallel.hpp"
#include "dvpsched/semistatic.hpp"
#include "dvpsched/sim.hpp"

namespace dvpsched {

namespace {

constexpr std::string_view kCsvHeader = "x1,x2,w,N,pe,y,policy,dvp,ci_low,ci_high,ms";

auto config_key(const ScenarioConfig& c) {
  return std::make_tuple(c.backlog1, c.backlog2, c.deadline, c.slots, c.p_error, c.batch);
}

double chain_states(const ScenarioConfig& cfg) {
  return static_cast<double>(cfg.first_hop_load() + 1) * static_cast<double>(cfg.total_load() + 1);
}

EvalResult exact_with_cap(const ScenarioConfig& cfg, const Policy& policy) {
  const double states = chain_states(cfg);
  if (states > kChainStateCap) throw CapExceeded("exact chain state space", states, kChainStateCap);
  return exact_dvp_chain(cfg, policy);
}

// Maps the library's error types onto exit codes.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CapExceeded& e) {
    err << "size cap: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + '"';
}

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"' && fields.back().empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw ParseError(line_no, "unterminated quoted field");
  return fields;
}

std::string optional_prob(const std::optional<double>& v) {
  return v ? format_probability(*v) : std::string();
}

std::string format_ms(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

std::optional<double> read_optional(const std::string& field, std::size_t line_no,
                                    std::string_view name) {
  if (field.empty()) return std::nullopt;
  double v = 0.0;
  if (!parse_double(field, v)) throw ParseError(line_no, "bad " + std::string(name) + " '" + field + "'");
  return v;
}

int read_int_field(const std::string& field, std::size_t line_no, std::string_view name) {
  int v = 0;
  if (!parse_int(field, v)) throw ParseError(line_no, "bad " + std::string(name) + " '" + field + "'");
  return v;
}

std::vector<int> parse_int_values(std::string_view text, std::size_t line_no, std::string_view key) {
  std::vector<int> out;
  for (const auto& raw : split(text, ',')) {
    const auto token = trim(raw);
    if (token.empty()) continue;
    const auto dots = token.find("..");
    if (dots != std::string_view::npos) {
      int lo = 0, hi = 0;
      if (!parse_int(trim(token.substr(0, dots)), lo) || !parse_int(trim(token.substr(dots + 2)), hi) ||
          lo > hi)
        throw ParseError(line_no, "bad range '" + std::string(token) + "' for " + std::string(key));
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      int v = 0;
      if (!parse_int(token, v))
        throw ParseError(line_no, "bad integer '" + std::string(token) + "' for " + std::string(key));
      out.push_back(v);
    }
  }
  if (out.empty()) throw ParseError(line_no, "empty list for " + std::string(key));
  return out;
}

std::vector<double> parse_real_values(std::string_view text, std::size_t line_no, std::string_view key) {
  std::vector<double> out;
  for (const auto& raw : split(text, ',')) {
    const auto token = trim(raw);
    if (token.empty()) continue;
    double v = 0.0;
    if (!parse_double(token, v))
      throw ParseError(line_no, "bad number '" + std::string(token) + "' for " + std::string(key));
    out.push_back(v);
  }
  if (out.empty()) throw ParseError(line_no, "empty list for " + std::string(key));
  return out;
}

bool parse_switch(std::string_view text, std::size_t line_no, std::string_view key) {
  if (text == "on" || text == "true" || text == "1") return true;
  if (text == "off" || text == "false" || text == "0") return false;
  throw ParseError(line_no, "expected on/off for " + std::string(key));
}

std::string score_label(SemiStaticMethod m) {
  switch (m) {
    case SemiStaticMethod::wtb_r:
    case SemiStaticMethod::wtb_w:
    case SemiStaticMethod::e_wtb: return "wtb";
    case SemiStaticMethod::wtb_d:
    case SemiStaticMethod::e_dvpub: return "dvpub";
    case SemiStaticMethod::opt:
    case SemiStaticMethod::fifty_fifty: return "dvp";
  }
  return "score";
}

}  // namespace

const std::vector<std::string>& policy_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v{"wtb-r", "wtb-w", "wtb-d", "e-wtb", "e-dvpub", "opt",
                               "fifty", "mdp",   "mw",    "wfq",   "bp"};
    std::sort(v.begin(), v.end());
    return v;
  }();
  return names;
}

bool is_policy_name(std::string_view name) {
  const auto& names = policy_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Policy resolve_policy(const ScenarioConfig& cfg, std::string_view name) {
  cfg.validate();
  if (name == "fifty") return Schedule::uniform(cfg.slots, cfg.deadline, (cfg.slots + 1) / 2);
  if (name == "mdp") return value_iteration(cfg);
  if (auto m = parse_semistatic(name)) return solve_semistatic(cfg, *m).schedule;
  if (auto b = parse_baseline(name)) return *b;
  throw DomainError("unknown policy '" + std::string(name) + "'");
}

std::vector<ScenarioConfig> SweepSpec::configs() const {
  std::vector<std::pair<int, int>> pairs = backlogs;
  if (pairs.empty())
    for (int a : x1)
      for (int b : x2) pairs.emplace_back(a, b);
  std::vector<ScenarioConfig> out;
  for (const auto& [a, b] : pairs)
    for (int ww : w)
      for (int n : slots)
        for (double p : p_error)
          for (int yy : y) out.push_back({n, p, ww, yy, a, b});
  std::sort(out.begin(), out.end(),
            [](const auto& l, const auto& r) { return config_key(l) < config_key(r); });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SweepSpec parse_sweep(std::istream& is) {
  SweepSpec spec;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    const std::string key(trim(text.substr(0, eq)));
    const auto value = trim(text.substr(eq + 1));
    if (!seen.insert(key).second) throw ParseError(line_no, "duplicate key '" + key + "'");

    if (key == "x1") {
      spec.x1 = parse_int_values(value, line_no, key);
    } else if (key == "x2") {
      spec.x2 = parse_int_values(value, line_no, key);
    } else if (key == "w") {
      spec.w = parse_int_values(value, line_no, key);
    } else if (key == "N") {
      spec.slots = parse_int_values(value, line_no, key);
    } else if (key == "y") {
      spec.y = parse_int_values(value, line_no, key);
    } else if (key == "pe") {
      spec.p_error = parse_real_values(value, line_no, key);
    } else if (key == "backlogs") {
      spec.backlogs.clear();
      for (const auto& raw : split(value, ',')) {
        const auto token = trim(raw);
        if (token.empty()) continue;
        const auto colon = token.find(':');
        int a = 0, b = 0;
        if (colon == std::string_view::npos || !parse_int(trim(token.substr(0, colon)), a) ||
            !parse_int(trim(token.substr(colon + 1)), b))
          throw ParseError(line_no, "bad backlog pair '" + std::string(token) + "', expected x1:x2");
        spec.backlogs.emplace_back(a, b);
      }
      if (spec.backlogs.empty()) throw ParseError(line_no, "empty list for backlogs");
    } else if (key == "policies") {
      spec.policies.clear();
      for (const auto& raw : split(value, ',')) {
        const std::string name(trim(raw));
        if (name.empty()) continue;
        if (!is_policy_name(name)) throw ParseError(line_no, "unknown policy '" + name + "'");
        spec.policies.push_back(name);
      }
    } else if (key == "evaluator") {
      if (value == "exact")
        spec.evaluator.kind = Evaluator::Kind::exact;
      else if (value == "monte-carlo")
        spec.evaluator.kind = Evaluator::Kind::monte_carlo;
      else
        throw ParseError(line_no, "evaluator must be exact or monte-carlo");
    } else if (key == "reps") {
      unsigned long long v = 0;
      if (!parse_u64(value, v) || v < 1) throw ParseError(line_no, "reps must be a positive integer");
      spec.evaluator.replications = static_cast<long long>(v);
    } else if (key == "seed") {
      unsigned long long v = 0;
      if (!parse_u64(value, v)) throw ParseError(line_no, "seed must be an unsigned integer");
      spec.evaluator.seed = v;
    } else if (key == "timing") {
      spec.timing = parse_switch(value, line_no, key);
    } else if (key == "threads") {
      int v = 0;
      if (!parse_int(value, v) || v < 0) throw ParseError(line_no, "threads must be >= 0");
      spec.threads = static_cast<unsigned>(v);
    } else {
      throw ParseError(line_no, "unknown key '" + key + "'");
    }
  }
  if (seen.count("backlogs") && (seen.count("x1") || seen.count("x2")))
    throw ParseError(line_no, "backlogs cannot be combined with x1/x2 lists");
  std::sort(spec.policies.begin(), spec.policies.end());
  spec.policies.erase(std::unique(spec.policies.begin(), spec.policies.end()), spec.policies.end());
  return spec;
}

bool row_less(const SweepRow& a, const SweepRow& b) {
  return std::tie(a.config.backlog1, a.config.backlog2, a.config.deadline, a.config.slots,
                  a.config.p_error, a.config.batch, a.policy) <
         std::tie(b.config.backlog1, b.config.backlog2, b.config.deadline, b.config.slots,
                  b.config.p_error, b.config.batch, b.policy);
}

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  const bool with_error =
      std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.error.empty(); });
  os << kCsvHeader << (with_error ? ",error" : "") << '\n';
  for (const auto& r : rows) {
    const auto& c = r.config;
    os << c.backlog1 << ',' << c.backlog2 << ',' << c.deadline << ',' << c.slots << ','
       << format_real(c.p_error) << ',' << c.batch << ',' << csv_field(r.policy) << ','
       << optional_prob(r.dvp) << ',' << optional_prob(r.ci_low) << ',' << optional_prob(r.ci_high)
       << ',' << (r.ms ? format_ms(*r.ms) : std::string());
    if (with_error) os << ',' << csv_field(r.error);
    os << '\n';
  }
}

std::vector<SweepRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError(1, "missing CSV header");
  bool with_error = false;
  if (line == std::string(kCsvHeader) + ",error")
    with_error = true;
  else if (line != kCsvHeader)
    throw ParseError(1, "unexpected CSV header '" + line + "'");
  const std::size_t width = with_error ? 12 : 11;

  std::vector<SweepRow> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line, line_no);
    if (f.size() != width)
      throw ParseError(line_no, "expected " + std::to_string(width) + " fields, got " +
                                    std::to_string(f.size()));
    SweepRow r;
    r.config.backlog1 = read_int_field(f[0], line_no, "x1");
    r.config.backlog2 = read_int_field(f[1], line_no, "x2");
    r.config.deadline = read_int_field(f[2], line_no, "w");
    r.config.slots = read_int_field(f[3], line_no, "N");
    if (!parse_double(f[4], r.config.p_error)) throw ParseError(line_no, "bad pe '" + f[4] + "'");
    r.config.batch = read_int_field(f[5], line_no, "y");
    r.policy = f[6];
    r.dvp = read_optional(f[7], line_no, "dvp");
    r.ci_low = read_optional(f[8], line_no, "ci_low");
    r.ci_high = read_optional(f[9], line_no, "ci_high");
    r.ms = read_optional(f[10], line_no, "ms");
    if (with_error) r.error = f[11];
    rows.push_back(std::move(r));
  }
  return rows;
}

SweepRow run_cell(const ScenarioConfig& cfg, const std::string& policy, const Evaluator& evaluator,
                  bool timing) {
  SweepRow row;
  row.config = cfg;
  row.policy = policy;
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto resolved = resolve_policy(cfg, policy);
    if (evaluator.kind == Evaluator::Kind::exact) {
      row.dvp = exact_with_cap(cfg, resolved).dvp;
    } else {
      SimSpec sim{evaluator.replications, evaluator.seed, resolved, 0};
      const auto r = simulate(cfg, sim);
      row.dvp = r.dvp_hat;
      row.ci_low = r.ci_low;
      row.ci_high = r.ci_high;
    }
  } catch (const std::exception& e) {
    row.dvp.reset();
    row.error = e.what();
    if (row.error.empty()) row.error = "failed";
  }
  if (timing)
    row.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  const auto configs = spec.configs();
  std::vector<std::string> policies = spec.policies;
  std::sort(policies.begin(), policies.end());
  std::vector<SweepRow> rows(configs.size() * policies.size());
  parallel_for(
      rows.size(),
      [&](std::size_t i) {
        rows[i] = run_cell(configs[i / policies.size()], policies[i % policies.size()],
                           spec.evaluator, spec.timing);
      },
      spec.threads);
  std::stable_sort(rows.begin(), rows.end(), row_less);
  return rows;
}

int cmd_solve(const SolveRequest& req, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    req.config.validate();
    if (!is_policy_name(req.method)) {
      err << "unknown method '" << req.method << "'\n";
      return static_cast<int>(kExitUsage);
    }
    if (auto m = parse_semistatic(req.method)) {
      const auto r = solve_semistatic(req.config, *m);
      out << "n1=" << r.schedule.to_string() << '\n';
      out << score_label(*m) << '=' << format_probability(r.score) << '\n';
      if (r.relaxed) {
        out << "relaxed_n2=" << join_reals(r.relaxed->n2) << '\n';
        out << "relaxed_wtb=" << format_probability(r.relaxed->objective) << '\n';
      }
      return static_cast<int>(kExitOk);
    }
    const PolicyTable table = req.method == "mdp"
                                  ? value_iteration(req.config)
                                  : tabulate_policy(TransitionKernel(req.config),
                                                    Policy(*parse_baseline(req.method)));
    const auto j0 = table.value(0, initial_state(req.config));
    if (req.out_path) {
      std::ofstream file(*req.out_path);
      if (!file) throw std::runtime_error("cannot write '" + *req.out_path + "'");
      table.write(file);
      out << "policy-table=" << *req.out_path << '\n';
      out << "J0=" << format_value12(j0.value_or(0.0)) << '\n';
    } else {
      table.write(out);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_eval(const EvalRequest& req, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const int sources = static_cast<int>(req.n1.has_value()) +
                        static_cast<int>(req.policy_file.has_value()) +
                        static_cast<int>(req.policy.has_value());
    if (sources != 1) {
      err << "give exactly one of --n1, --policy-file, --method\n";
      return static_cast<int>(kExitUsage);
    }
    const auto& cfg = req.config;
    cfg.validate();

    std::optional<Policy> policy;
    if (req.n1) {
      auto schedule = Schedule::from_n1(cfg.slots, *req.n1);
      if (schedule.frames() != cfg.deadline)
        throw ConfigError("schedule has " + std::to_string(schedule.frames()) + " frames, w=" +
                          std::to_string(cfg.deadline));
      policy.emplace(std::move(schedule));
    } else if (req.policy_file) {
      std::ifstream file(*req.policy_file);
      if (!file) throw ConfigError("cannot read '" + *req.policy_file + "'");
      auto table = PolicyTable::read(file);
      if (!(table.config() == cfg))
        throw ConfigError("policy file is for " + table.config().to_string() + ", requested " +
                          cfg.to_string());
      policy.emplace(std::move(table));
    } else {
      if (!is_policy_name(*req.policy)) {
        err << "unknown policy '" << *req.policy << "'\n";
        return static_cast<int>(kExitUsage);
      }
      policy.emplace(resolve_policy(cfg, *req.policy));
    }

    const auto need_schedule = [&]() -> const Schedule& {
      if (!policy->schedule())
        throw ConfigError("evaluator '" + req.evaluator + "' needs a semi-static schedule");
      return *policy->schedule();
    };

    if (req.evaluator == "exact") {
      const auto r = exact_with_cap(cfg, *policy);
      out << "dvp=" << format_probability(r.dvp) << '\n';
      out << "mean_departures=" << format_value12(r.mean_departures.value_or(0.0)) << '\n';
    } else if (req.evaluator == "enum") {
      const auto r = exact_dvp_enum(cfg, need_schedule());
      out << "dvp=" << format_probability(r.dvp) << '\n';
    } else if (req.evaluator == "dvpub") {
      out << "dvpub=" << format_probability(dvpub(cfg, need_schedule()).dvp) << '\n';
    } else if (req.evaluator == "wtb") {
      const auto m = wtb_min_s(cfg, need_schedule());
      out << "wtb=" << format_probability(m.value) << '\n';
      out << "s=" << format_real(m.s) << '\n';
    } else if (req.evaluator == "monte-carlo") {
      const auto r = simulate(cfg, SimSpec{req.replications, req.seed, *policy, 0});
      out << "dvp=" << format_probability(r.dvp_hat) << '\n';
      out << "ci_low=" << format_probability(r.ci_low) << '\n';
      out << "ci_high=" << format_probability(r.ci_high) << '\n';
      out << "mean_departures=" << format_value12(r.mean_departures) << '\n';
      out << "replications=" << r.replications << '\n';
    } else {
      err << "unknown evaluator '" << req.evaluator << "'\n";
      return static_cast<int>(kExitUsage);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_sweep(const SweepRequest& req, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream file(req.sweep_file);
    if (!file) throw ConfigError("cannot read '" + req.sweep_file + "'");
    const auto spec = parse_sweep(file);
    if (spec.policies.empty()) {
      err << "sweep file lists no policies\n";
      return static_cast<int>(kExitUsage);
    }
    for (const auto& cfg : spec.configs()) cfg.validate();

    const auto rows = run_sweep(spec);
    if (req.out_path) {
      std::ofstream dest(*req.out_path);
      if (!dest) throw ConfigError("cannot write '" + *req.out_path + "'");
      write_csv(dest, rows);
    } else {
      write_csv(out, rows);
    }
    const auto failed =
        std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.error.empty(); });
    if (failed > 0) {
      err << failed << " of " << rows.size() << " cells failed\n";
      return static_cast<int>(kExitCellFailure);
    }
    return static_cast<int>(kExitOk);
  });
}

}  // namespace dvpsched
