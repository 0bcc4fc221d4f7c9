#include "crowdsched/online.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "crowdsched/lp.hpp"
#include "crowdsched/random.hpp"
#include "crowdsched/rounding.hpp"

namespace crowdsched {

void MeetingTrace::validate(std::size_t workers) const {
  double last = 0.0;
  for (std::size_t k = 0; k < events.size(); ++k) {
    const auto& e = events[k];
    if (!(e.time >= 0.0) || e.time > horizon)
      throw std::invalid_argument("meeting " + std::to_string(k) + " lies outside [0, horizon]");
    if (e.time < last) throw std::invalid_argument("meeting times must be non-decreasing");
    if (e.worker >= workers) throw std::invalid_argument("meeting with unknown worker");
    last = e.time;
  }
}

MeetingTrace simulate_meetings(const Instance& instance, std::uint64_t seed, double horizon) {
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  MeetingTrace trace;
  trace.horizon = horizon;
  for (std::size_t i = 0; i < instance.workers(); ++i) {
    Rng rng(derive_seed(seed, {i}));
    const double mean = instance.phi(i);
    double t = 0.0;
    while (true) {
      // Inverse transform on (0, 1] keeps the log finite.
      t += -mean * std::log(1.0 - uniform01(rng));
      if (t > horizon) break;
      trace.events.push_back({t, i});
    }
  }
  std::sort(trace.events.begin(), trace.events.end(), [](const Meeting& a, const Meeting& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.worker < b.worker;
  });
  return trace;
}

OfflinePlanner offline_lrf_identical() {
  return [](const Instance& sub, std::span<const double> overhead) {
    return lrf_identical(sub, overhead).assignment;
  };
}

OfflinePlanner offline_lrf(LrfVariant variant) {
  return [variant](const Instance& sub, std::span<const double> overhead) {
    return lrf_variant(sub, variant, overhead).assignment;
  };
}

OfflinePlanner offline_edts(double epsilon) {
  return [epsilon](const Instance& sub, std::span<const double> overhead) {
    auto model = build_interval_indexed(sub, epsilon, IntervalObjective::MeanBusy, overhead);
    auto res = solve(model);
    if (res.status != SolveStatus::Optimal) throw ResourceError("re-planning LP did not solve");
    return edts(res.solution, sub, nullptr, overhead).assignment;
  };
}

double plan_value(const Instance& instance, std::span<const std::size_t> assignment,
                  std::span<const double> overhead) {
  if (assignment.size() != instance.tasks() || overhead.size() != instance.workers())
    throw std::invalid_argument("plan does not match the instance");
  const auto s = Schedule::from_assignment(instance, {assignment.begin(), assignment.end()});
  return evaluate(instance, s, overhead).wct;
}

Schedule OnlineResult::schedule() const {
  if (!finished()) throw std::logic_error("online run left tasks unassigned");
  return Schedule{assignment, order};
}

OnlineResult cosmos(const Instance& instance, const MeetingTrace& trace, const OfflinePlanner& offline,
                    const CosmosOptions& options) {
  const std::size_t m = instance.workers();
  const std::size_t n = instance.tasks();
  trace.validate(m);

  // Meeting times per worker for feedback lookups.
  std::vector<std::vector<double>> meetings(m);
  for (const auto& e : trace.events) meetings[e.worker].push_back(e.time);

  OnlineResult out;
  out.assignment.assign(n, OnlineResult::kUnassigned);
  out.order.resize(m);
  out.completion.assign(n, 0.0);
  out.start.assign(n, 0.0);

  std::vector<char> active(m, 1);
  std::vector<std::size_t> remaining(n);
  for (std::size_t j = 0; j < n; ++j) remaining[j] = j;
  // Previous plan in global indices (worker per task), kUnassigned if none.
  std::vector<std::size_t> previous(n, OnlineResult::kUnassigned);
  bool have_previous = false;

  for (const auto& e : trace.events) {
    if (remaining.empty()) break;
    const std::size_t met = e.worker;
    if (!active[met]) continue;

    std::vector<std::size_t> workers;
    for (std::size_t i = 0; i < m; ++i)
      if (active[i]) workers.push_back(i);
    std::vector<double> load(workers.size());
    for (std::size_t a = 0; a < workers.size(); ++a) {
      const std::size_t i = workers[a];
      load[a] = i == met ? instance.phi(i) : 2.0 * instance.phi(i) - e.time;
    }
    const Instance sub = instance.subset(workers, remaining);

    auto plan = offline(sub, load);
    if (plan.size() != remaining.size()) throw std::logic_error("offline planner returned a partial plan");
    for (std::size_t v : plan)
      if (v >= workers.size()) throw std::logic_error("offline planner used an unknown worker");

    CosmosStep step;
    step.time = e.time;
    step.worker = met;
    step.remaining = remaining.size();
    step.plan_value = plan_value(sub, plan, load);
    step.inherited_value = std::numeric_limits<double>::quiet_NaN();
    if (have_previous) {
      std::vector<std::size_t> local(m, 0);
      for (std::size_t a = 0; a < workers.size(); ++a) local[workers[a]] = a;
      std::vector<std::size_t> inherited(remaining.size());
      for (std::size_t k = 0; k < remaining.size(); ++k) inherited[k] = local[previous[remaining[k]]];
      step.inherited_value = plan_value(sub, inherited, load);
      if (options.monotone_guard && step.plan_value > step.inherited_value) {
        plan = std::move(inherited);
        step.plan_value = step.inherited_value;
        step.kept_previous = true;
      }
    }

    // Hand over the met worker's share in Smith order.
    std::size_t met_local = 0;
    while (workers[met_local] != met) ++met_local;
    std::vector<std::size_t> mine;
    std::vector<std::size_t> rest;
    for (std::size_t k = 0; k < remaining.size(); ++k) {
      previous[remaining[k]] = workers[plan[k]];
      (plan[k] == met_local ? mine : rest).push_back(remaining[k]);
    }
    mine = smith_order(instance, met, std::move(mine));
    const auto& seen = meetings[met];
    double clock = e.time;
    for (std::size_t j : mine) {
      clock += instance.rst(met, j);
      auto it = std::lower_bound(seen.begin(), seen.end(), clock);
      double done;
      if (it != seen.end()) {
        done = *it;
      } else {
        done = std::max(trace.horizon, clock) + instance.phi(met);
        out.late_feedback.push_back(j);
      }
      out.assignment[j] = met;
      out.completion[j] = done;
      out.start[j] = e.time;
      out.wct += instance.weight(j) * done;
    }
    out.order[met] = mine;
    step.committed = mine.size();
    out.steps.push_back(step);

    active[met] = 0;
    remaining = std::move(rest);
    have_previous = true;
  }
  out.unfinished = remaining;
  std::sort(out.late_feedback.begin(), out.late_feedback.end());
  return out;
}

}  // namespace crowdsched
