#include "dvpsched/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dvpsched/format.hpp"

namespace dvpsched {

void ScenarioConfig::validate() const {
  if (slots < 1) throw DomainError("N must be >= 1, got " + std::to_string(slots));
  if (deadline < 1) throw DomainError("w must be >= 1, got " + std::to_string(deadline));
  if (batch < 1) throw DomainError("y must be >= 1, got " + std::to_string(batch));
  if (backlog1 < 0) throw DomainError("x1 must be >= 0, got " + std::to_string(backlog1));
  if (backlog2 < 0) throw DomainError("x2 must be >= 0, got " + std::to_string(backlog2));
  if (!(p_error >= 0.0 && p_error <= 1.0))
    throw DomainError("p_e must lie in [0, 1], got " + format_real(p_error));
}

std::string ScenarioConfig::to_string() const {
  std::ostringstream os;
  os << "N=" << slots << " pe=" << format_real(p_error) << " w=" << deadline << " y=" << batch
     << " x1=" << backlog1 << " x2=" << backlog2;
  return os.str();
}

Schedule Schedule::from_n1(int slots, std::vector<int> n1) {
  if (slots < 1) throw DomainError("schedule needs N >= 1");
  for (std::size_t k = 0; k < n1.size(); ++k) {
    if (n1[k] < 0 || n1[k] > slots)
      throw DomainError("n1[" + std::to_string(k) + "]=" + std::to_string(n1[k]) +
                        " outside {0.." + std::to_string(slots) + "}");
  }
  return Schedule(slots, std::move(n1));
}

Schedule Schedule::from_n2(int slots, std::span<const int> n2) {
  std::vector<int> n1(n2.size());
  std::transform(n2.begin(), n2.end(), n1.begin(), [slots](int v) { return slots - v; });
  return from_n1(slots, std::move(n1));
}

Schedule Schedule::uniform(int slots, int frames, int n1) {
  return from_n1(slots, std::vector<int>(static_cast<std::size_t>(frames), n1));
}

int Schedule::slots_for(int link, int frame) const {
  if (link == 1) return n1(frame);
  if (link == 2) return n2(frame);
  throw DomainError("link must be 1 or 2, got " + std::to_string(link));
}

std::vector<int> Schedule::n2_vector() const {
  std::vector<int> out(n1_.size());
  std::transform(n1_.begin(), n1_.end(), out.begin(), [this](int v) { return slots_ - v; });
  return out;
}

std::vector<double> Schedule::n2_real() const {
  std::vector<double> out(n1_.size());
  std::transform(n1_.begin(), n1_.end(), out.begin(),
                 [this](int v) { return static_cast<double>(slots_ - v); });
  return out;
}

bool Schedule::in_bound_domain() const {
  return std::all_of(n1_.begin(), n1_.end(), [this](int v) { return v >= 1 && v <= slots_ - 1; });
}

std::string Schedule::to_string() const { return join_ints(n1_); }

std::string QueueState::to_string() const {
  return "(" + std::to_string(q1) + "," + std::to_string(q2) + ")";
}

double binomial_pmf(int n, double p, int r) {
  if (n < 0) throw DomainError("binomial trial count must be >= 0");
  if (r < 0 || r > n)
    throw DomainError("binomial success count " + std::to_string(r) + " outside {0.." +
                      std::to_string(n) + "}");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial probability outside [0, 1]");
  if (p == 0.0) return r == 0 ? 1.0 : 0.0;
  if (p == 1.0) return r == n ? 1.0 : 0.0;
  const double log_choose =
      std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
  return std::exp(log_choose + r * std::log(p) + (n - r) * std::log1p(-p));
}

double binomial_cdf(int n, double p, int r) {
  if (r < 0 || r > n)
    throw DomainError("binomial cdf argument " + std::to_string(r) + " outside {0.." +
                      std::to_string(n) + "}");
  if (r == n) {
    binomial_pmf(n, p, r);  // validates p
    return 1.0;
  }
  double sum = 0.0;
  for (int j = 0; j <= r; ++j) sum += binomial_pmf(n, p, j);
  return std::min(sum, 1.0);
}

std::vector<double> binomial_row(int n, double p) {
  std::vector<double> row(static_cast<std::size_t>(n) + 1);
  for (int r = 0; r <= n; ++r) row[static_cast<std::size_t>(r)] = binomial_pmf(n, p, r);
  return row;
}

double binomial_cdf_clamped(int n, double p, int c) {
  if (c < 0) return 0.0;
  if (c >= n) return 1.0;
  return binomial_cdf(n, p, c);
}

StepResult step_queues(QueueState state, int s1, int s2) {
  const int d1 = std::min(state.q1, s1);
  const int d2 = std::min(state.q2, s2);
  StepResult out;
  out.outcome = {s1, s2, d1, d2};
  out.next.q1 = state.q1 - d1;
  out.next.q2 = state.q2 - d2 + d1;
  return out;
}

int cumulative_service_params(const Schedule& schedule, int link, int frames) {
  if (frames < 0 || frames > schedule.frames())
    throw DomainError("frame count " + std::to_string(frames) + " outside {0.." +
                      std::to_string(schedule.frames()) + "}");
  int total = 0;
  for (int k = 0; k < frames; ++k) total += schedule.slots_for(link, k);
  return total;
}

int trailing_service_params(const Schedule& schedule, int link, int frames) {
  const int w = schedule.frames();
  if (frames < 0 || frames > w)
    throw DomainError("frame count " + std::to_string(frames) + " outside {0.." +
                      std::to_string(w) + "}");
  int total = 0;
  for (int k = w - frames; k < w; ++k) total += schedule.slots_for(link, k);
  return total;
}

}  // namespace dvpsched
