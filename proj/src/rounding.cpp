#include "crowdsched/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crowdsched/random.hpp"

namespace crowdsched {

namespace {

constexpr double kMarginalTolerance = 1e-6;

// Smith order of all tasks on every worker plus each task's position in it.
struct Priorities {
  std::vector<std::vector<std::size_t>> order;
  std::vector<std::vector<std::size_t>> rank;

  explicit Priorities(const Instance& inst) : order(inst.workers()), rank(inst.workers()) {
    for (std::size_t i = 0; i < inst.workers(); ++i) {
      order[i] = smith_order(inst, i);
      rank[i].resize(inst.tasks());
      for (std::size_t k = 0; k < order[i].size(); ++k) rank[i][order[i][k]] = k;
    }
  }
};

void check_shapes(const FractionalSolution& sol, const Instance& inst) {
  if (sol.workers() != inst.workers() || sol.tasks() != inst.tasks())
    throw std::invalid_argument("solution shape does not match the instance");
}

void check_partial(const PartialAssignment& partial, const Instance& inst) {
  if (partial.tasks() != inst.tasks())
    throw std::invalid_argument("partial assignment covers a different number of tasks");
}

std::vector<double> overheads(const Instance& inst, std::span<const double> overhead) {
  if (overhead.empty()) return inst.contact_times();
  if (overhead.size() != inst.workers())
    throw std::invalid_argument("overhead must have one entry per worker");
  return {overhead.begin(), overhead.end()};
}

Schedule smith_schedule(const Instance& inst, std::vector<std::size_t> assignment) {
  return Schedule::from_assignment(inst, std::move(assignment));
}

// Weight of q in worker i's prefix sums: y_iq while open, 1 once on i.
inline double open_mass(const PartialAssignment& partial, const std::vector<double>& y,
                        std::size_t tasks, std::size_t i, std::size_t q) {
  if (!partial.assigned(q)) return y[i * tasks + q];
  return partial.worker_of(q) == i ? 1.0 : 0.0;
}

std::vector<double> grouping_marginals(const std::vector<Grouping>& groupings, std::size_t m,
                                       std::size_t n) {
  if (groupings.size() != m) throw std::invalid_argument("need one grouping per worker");
  std::vector<double> y(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& g = groupings[i];
    if (g.worker != i) throw std::invalid_argument("groupings must be indexed by worker");
    for (const auto& row : g.mass) {
      if (row.size() != n) throw std::invalid_argument("group mass vector has the wrong length");
      for (std::size_t j = 0; j < n; ++j) y[i * n + j] += row[j];
    }
  }
  return y;
}

// Shared state for the grouped formulas.
struct GroupedModel {
  const Instance& inst;
  const std::vector<Grouping>& groups;
  double eta;
  std::vector<double> y;  // y_ij = sum_u y_uj
  Priorities prio;

  GroupedModel(const Instance& instance, const std::vector<Grouping>& g, double eta_)
      : inst(instance),
        groups(g),
        eta(eta_),
        y(grouping_marginals(g, instance.workers(), instance.tasks())),
        prio(instance) {}

  bool dominated(std::size_t i, std::size_t j) const { return y[i * inst.tasks() + j] > 0.5; }

  // Undiscounted value with j placed on i.
  double base(std::size_t i, std::size_t j, const PartialAssignment& P) const {
    const std::size_t n = inst.tasks();
    double v = inst.worker(i).contact_time() + inst.rst(i, j);
    const auto& ord = prio.order[i];
    for (std::size_t k = 0; k < prio.rank[i][j]; ++k) {
      const std::size_t q = ord[k];
      v += open_mass(P, y, n, i, q) * inst.rst(i, q);
    }
    return v;
  }

  // Amount removed from the group-u value of j by the (1 - eta) factor.
  double discount(std::size_t i, std::size_t u, std::size_t j, const PartialAssignment& P) const {
    if (eta == 0.0 || dominated(i, j)) return 0.0;
    const auto& mass = groups[i].mass[u];
    const auto& ord = prio.order[i];
    double d = 0.0;
    for (std::size_t k = 0; k < prio.rank[i][j]; ++k) {
      const std::size_t q = ord[k];
      if (P.assigned(q) || dominated(i, q) || mass[q] == 0.0) continue;
      d += mass[q] * inst.rst(i, q);
    }
    return eta * d;
  }

  // Value of j once committed to i (mixture over i's groups).
  double committed(std::size_t i, std::size_t j, const PartialAssignment& P) const {
    double v = base(i, j, P);
    const double yij = y[i * inst.tasks() + j];
    if (yij <= 0.0 || eta == 0.0 || dominated(i, j)) return v;
    for (std::size_t u = 0; u < groups[i].groups(); ++u) {
      const double share = groups[i].mass[u][j];
      if (share > 0.0) v -= share / yij * discount(i, u, j, P);
    }
    return v;
  }

  double expected(std::size_t j, const PartialAssignment& P) const {
    if (P.assigned(j)) return committed(P.worker_of(j), j, P);
    double v = 0.0;
    for (std::size_t i = 0; i < inst.workers(); ++i) {
      const double yij = y[i * inst.tasks() + j];
      if (yij == 0.0) continue;
      double term = yij * base(i, j, P);
      for (std::size_t u = 0; u < groups[i].groups(); ++u) {
        const double share = groups[i].mass[u][j];
        if (share > 0.0) term -= share * discount(i, u, j, P);
      }
      v += term;
    }
    return v;
  }

  double objective(const PartialAssignment& P) const {
    double total = 0.0;
    for (std::size_t j = 0; j < inst.tasks(); ++j) total += inst.weight(j) * expected(j, P);
    return total;
  }
};

}  // namespace

bool dominates(const FractionalSolution& solution, std::size_t worker, std::size_t task) {
  return solution.y(worker, task) > 0.5;
}

std::vector<double> normalized_marginals(const FractionalSolution& solution) {
  const std::size_t m = solution.workers();
  const std::size_t n = solution.tasks();
  std::vector<double> y(m * n);
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += solution.y(i, j);
    if (std::abs(sum - 1.0) > kMarginalTolerance)
      throw std::invalid_argument("marginals of task " + std::to_string(j) + " sum to " +
                                  std::to_string(sum));
    for (std::size_t i = 0; i < m; ++i) y[i * n + j] = solution.y(i, j) / sum;
  }
  return y;
}

void PartialAssignment::assign(std::size_t j, std::size_t i) {
  if (assigned(j)) throw StructuralError("task " + std::to_string(j) + " is already assigned");
  worker_.at(j) = i;
}

RoundedAssignment independent_round(const FractionalSolution& solution, const Instance& instance,
                                    std::uint64_t seed) {
  check_shapes(solution, instance);
  normalized_marginals(solution);  // validates the sums
  const std::size_t n = instance.tasks();
  RoundedAssignment r;
  r.sigma.resize(n);
  r.slot.resize(n);
  r.start.resize(n);
  r.tau.resize(n);
  r.theta.resize(n);
  const auto& entries = solution.entries();
  for (std::size_t j = 0; j < n; ++j) {
    Rng rng(derive_seed(seed, {j}));
    const auto& mine = solution.task_entries(j);
    double total = 0.0;
    for (std::size_t k : mine) total += entries[k].value;
    const double target = uniform01(rng) * total;
    std::size_t pick = mine.back();
    double acc = 0.0;
    for (std::size_t k : mine) {
      acc += entries[k].value;
      if (target < acc) {
        pick = k;
        break;
      }
    }
    const auto& e = entries[pick];
    r.sigma[j] = e.worker;
    r.slot[j] = e.slot;
    r.start[j] = solution.start(e.slot);
    r.tau[j] = uniform01(rng) * instance.rst(e.worker, j);
    r.theta[j] = r.start[j] + r.tau[j];
  }
  return r;
}

Schedule rts(const FractionalSolution& solution, const Instance& instance, std::uint64_t seed,
             double alpha, RoundedAssignment* rounded) {
  auto r = independent_round(solution, instance, seed);
  const std::size_t n = instance.tasks();
  std::vector<double> tie(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = r.sigma[j];
    r.theta[j] = (1.0 + alpha) * r.start[j] + r.tau[j];
    if (dominates(solution, i, j)) r.theta[j] += 0.2 * instance.rst(i, j);
    // A third draw from the task's stream, after the rectangle and offset.
    Rng rng(derive_seed(seed, {j}));
    uniform01(rng);
    uniform01(rng);
    tie[j] = uniform01(rng);
  }
  Schedule s;
  s.assignment = r.sigma;
  s.order.resize(instance.workers());
  for (std::size_t j = 0; j < n; ++j) s.order[r.sigma[j]].push_back(j);
  for (auto& seq : s.order)
    std::sort(seq.begin(), seq.end(), [&](std::size_t a, std::size_t b) {
      if (r.theta[a] != r.theta[b]) return r.theta[a] < r.theta[b];
      if (tie[a] != tie[b]) return tie[a] < tie[b];
      return a < b;
    });
  if (rounded) *rounded = std::move(r);
  return s;
}

double expected_completion_independent(const FractionalSolution& solution, const Instance& instance,
                                       std::size_t worker, std::size_t task,
                                       const PartialAssignment& partial) {
  check_shapes(solution, instance);
  check_partial(partial, instance);
  if (worker >= instance.workers() || task >= instance.tasks())
    throw std::invalid_argument("worker or task out of range");
  if (partial.assigned(task) && partial.worker_of(task) != worker)
    throw std::invalid_argument("task " + std::to_string(task) + " is committed to another worker");
  const auto y = normalized_marginals(solution);
  const std::size_t n = instance.tasks();
  double v = instance.worker(worker).contact_time() + instance.rst(worker, task);
  for (std::size_t q = 0; q < n; ++q) {
    if (q == task || !higher_priority(instance, worker, q, task)) continue;
    v += open_mass(partial, y, n, worker, q) * instance.rst(worker, q);
  }
  return v;
}

double expected_objective_independent(const FractionalSolution& solution, const Instance& instance,
                                      const PartialAssignment& partial,
                                      std::span<const double> overhead) {
  check_shapes(solution, instance);
  check_partial(partial, instance);
  const auto oh = overheads(instance, overhead);
  const auto y = normalized_marginals(solution);
  const std::size_t n = instance.tasks();
  double total = 0.0;
  for (std::size_t i = 0; i < instance.workers(); ++i) {
    const double phi2 = oh[i];
    double prefix = 0.0;
    for (std::size_t q : smith_order(instance, i)) {
      const double f = open_mass(partial, y, n, i, q);
      const double p = instance.rst(i, q);
      total += instance.weight(q) * f * (phi2 + p + prefix);
      prefix += f * p;
    }
  }
  return total;
}

Schedule edts(const FractionalSolution& solution, const Instance& instance,
              DerandomizationTrace* trace, std::span<const double> overhead) {
  check_shapes(solution, instance);
  const std::size_t m = instance.workers();
  const std::size_t n = instance.tasks();
  const auto y = normalized_marginals(solution);
  const Priorities prio(instance);
  PartialAssignment partial(n);

  double potential = 0.0;
  if (trace) {
    potential = expected_objective_independent(solution, instance, partial, overhead);
    trace->potential.assign(1, potential);
  }

  // f_i(q) kept densely so the inner loops stay branch-free.
  std::vector<double> f(y);
  const std::vector<double> phi2 = overheads(instance, overhead);
  std::vector<double> cost(m);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const auto& ord = prio.order[i];
      const std::size_t r = prio.rank[i][j];
      const double* fi = &f[i * n];
      double before = 0.0;  // sum over q ahead of j of f_i(q) p_iq
      for (std::size_t k = 0; k < r; ++k) before += fi[ord[k]] * instance.rst(i, ord[k]);
      double behind = 0.0;  // sum over q behind j of w_q f_i(q)
      for (std::size_t k = r + 1; k < n; ++k) behind += instance.weight(ord[k]) * fi[ord[k]];
      const double p = instance.rst(i, j);
      cost[i] = instance.weight(j) * (phi2[i] + p + before) + p * behind;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < m; ++i)
      if (cost[i] < cost[best]) best = i;
    if (trace) {
      double expected = 0.0;
      for (std::size_t i = 0; i < m; ++i) expected += y[i * n + j] * cost[i];
      potential += cost[best] - expected;
      trace->potential.push_back(potential);
    }
    partial.assign(j, best);
    for (std::size_t i = 0; i < m; ++i) f[i * n + j] = i == best ? 1.0 : 0.0;
  }

  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 0; j < n; ++j) assignment[j] = partial.worker_of(j);
  return smith_schedule(instance, std::move(assignment));
}

double Grouping::total(std::size_t task) const {
  double s = 0.0;
  for (const auto& row : mass) s += row.at(task);
  return s;
}

Grouping build_grouping(const FractionalSolution& solution, std::size_t worker) {
  if (worker >= solution.workers()) throw std::invalid_argument("worker out of range");
  const std::size_t n = solution.tasks();
  std::vector<FractionalEntry> rects;
  for (const auto& e : solution.entries())
    if (e.worker == worker && e.value > 0.0) rects.push_back(e);
  std::sort(rects.begin(), rects.end(), [&](const FractionalEntry& a, const FractionalEntry& b) {
    const double sa = solution.start(a.slot), sb = solution.start(b.slot);
    if (sa != sb) return sa < sb;
    if (a.task != b.task) return a.task < b.task;
    return a.slot < b.slot;
  });
  Grouping g;
  g.worker = worker;
  double filled = 0.0;
  for (const auto& e : rects) {
    double left = e.value;
    while (left > 0.0) {
      if (g.mass.empty() || filled >= 1.0) {
        g.mass.emplace_back(n, 0.0);
        filled = 0.0;
      }
      const double take = std::min(left, 1.0 - filled);
      g.mass.back()[e.task] += take;
      filled += take;
      left -= take;
    }
  }
  return g;
}

std::vector<Grouping> build_groupings(const FractionalSolution& solution) {
  std::vector<Grouping> out;
  for (std::size_t i = 0; i < solution.workers(); ++i) out.push_back(build_grouping(solution, i));
  return out;
}

double expected_completion_grouped(const Instance& instance, const std::vector<Grouping>& groupings,
                                   std::size_t worker, std::size_t group, std::size_t task,
                                   const PartialAssignment& partial, double eta) {
  check_partial(partial, instance);
  GroupedModel model(instance, groupings, eta);
  if (worker >= instance.workers() || group >= groupings[worker].groups() || task >= instance.tasks())
    throw std::invalid_argument("worker, group or task out of range");
  if (partial.assigned(task) && partial.worker_of(task) != worker)
    throw std::invalid_argument("task " + std::to_string(task) + " is committed to another worker");
  return model.base(worker, task, partial) - model.discount(worker, group, task, partial);
}

double expected_completion_grouped(const Instance& instance, const std::vector<Grouping>& groupings,
                                   std::size_t task, const PartialAssignment& partial, double eta) {
  check_partial(partial, instance);
  GroupedModel model(instance, groupings, eta);
  return model.expected(task, partial);
}

double grouped_expected_objective(const Instance& instance, const std::vector<Grouping>& groupings,
                                  const PartialAssignment& partial, double eta) {
  check_partial(partial, instance);
  GroupedModel model(instance, groupings, eta);
  return model.objective(partial);
}

Schedule dts(const Instance& instance, const std::vector<Grouping>& groupings, double eta,
             DerandomizationTrace* trace) {
  const std::size_t m = instance.workers();
  const std::size_t n = instance.tasks();
  GroupedModel model(instance, groupings, eta);
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += model.y[i * n + j];
    if (std::abs(sum - 1.0) > kMarginalTolerance)
      throw std::invalid_argument("grouping masses of task " + std::to_string(j) + " sum to " +
                                  std::to_string(sum));
  }
  PartialAssignment partial(n);
  if (trace) trace->potential.assign(1, model.objective(partial));

  std::vector<double> cost(m);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      // Only j's own value and its effect on tasks behind it depend on i.
      double behind = 0.0;
      const auto& order = model.prio.order[i];
      for (std::size_t k = model.prio.rank[i][j] + 1; k < n; ++k)
        behind += instance.weight(order[k]) * open_mass(partial, model.y, n, i, order[k]);
      cost[i] = instance.weight(j) * model.committed(i, j, partial) + instance.rst(i, j) * behind;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < m; ++i)
      if (cost[i] < cost[best]) best = i;
    partial.assign(j, best);
    if (trace) trace->potential.push_back(model.objective(partial));
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 0; j < n; ++j) assignment[j] = partial.worker_of(j);
  return smith_schedule(instance, std::move(assignment));
}

}  // namespace crowdsched
