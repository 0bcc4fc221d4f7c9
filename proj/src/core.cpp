#include "crowdsched/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace crowdsched {

Instance::Instance(std::vector<double> phi, std::vector<double> weights,
                   std::vector<std::vector<double>> rst) {
  if (phi.empty()) throw std::invalid_argument("instance needs at least one worker");
  if (rst.size() != phi.size())
    throw std::invalid_argument("rst has " + std::to_string(rst.size()) + " rows, expected " +
                                std::to_string(phi.size()));
  const std::size_t n = weights.size();
  workers_.reserve(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (!(phi[i] > 0.0) || !std::isfinite(phi[i]))
      throw std::invalid_argument("phi[" + std::to_string(i) + "] must be positive and finite");
    workers_.push_back({i, phi[i]});
  }
  tasks_.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (!(weights[j] >= 0.0) || !std::isfinite(weights[j]))
      throw std::invalid_argument("weight[" + std::to_string(j) + "] must be nonnegative");
    tasks_.push_back({j, weights[j]});
  }
  rst_.reserve(phi.size() * n);
  for (std::size_t i = 0; i < rst.size(); ++i) {
    if (rst[i].size() != n)
      throw std::invalid_argument("rst row " + std::to_string(i) + " has " +
                                  std::to_string(rst[i].size()) + " entries, expected " +
                                  std::to_string(n));
    for (double p : rst[i]) {
      if (!(p >= 0.0) || !std::isfinite(p))
        throw std::invalid_argument("rst entries must be nonnegative and finite");
      rst_.push_back(p);
    }
  }
}

std::vector<double> Instance::phis() const {
  std::vector<double> out;
  out.reserve(workers_.size());
  for (const auto& w : workers_) out.push_back(w.phi);
  return out;
}

std::vector<double> Instance::weights() const {
  std::vector<double> out;
  out.reserve(tasks_.size());
  for (const auto& t : tasks_) out.push_back(t.weight);
  return out;
}

std::vector<std::vector<double>> Instance::rst_rows() const {
  std::vector<std::vector<double>> rows(workers());
  for (std::size_t i = 0; i < workers(); ++i)
    rows[i].assign(rst_.begin() + static_cast<std::ptrdiff_t>(i * tasks()),
                   rst_.begin() + static_cast<std::ptrdiff_t>((i + 1) * tasks()));
  return rows;
}

std::vector<double> Instance::contact_times() const {
  std::vector<double> out;
  out.reserve(workers_.size());
  for (const auto& w : workers_) out.push_back(w.contact_time());
  return out;
}

bool Instance::identical_workers() const {
  for (std::size_t j = 0; j < tasks(); ++j)
    for (std::size_t i = 1; i < workers(); ++i)
      if (rst(i, j) != rst(0, j)) return false;
  return true;
}

Instance Instance::subset(std::span<const std::size_t> worker_ids,
                          std::span<const std::size_t> task_ids) const {
  std::vector<double> phi;
  std::vector<double> w;
  std::vector<std::vector<double>> p;
  for (std::size_t i : worker_ids) {
    phi.push_back(worker(i).phi);
    auto& row = p.emplace_back();
    for (std::size_t j : task_ids) row.push_back(rst(i, j));
  }
  for (std::size_t j : task_ids) w.push_back(task(j).weight);
  return Instance(std::move(phi), std::move(w), std::move(p));
}

Schedule Schedule::from_assignment(const Instance& instance, std::vector<std::size_t> assignment) {
  if (assignment.size() != instance.tasks())
    throw StructuralError("assignment covers " + std::to_string(assignment.size()) +
                          " tasks, instance has " + std::to_string(instance.tasks()));
  Schedule s;
  s.order.resize(instance.workers());
  for (std::size_t j = 0; j < assignment.size(); ++j) {
    if (assignment[j] >= instance.workers())
      throw StructuralError("task " + std::to_string(j) + " assigned to unknown worker " +
                            std::to_string(assignment[j]));
    s.order[assignment[j]].push_back(j);
  }
  for (std::size_t i = 0; i < s.order.size(); ++i)
    s.order[i] = smith_order(instance, i, std::move(s.order[i]));
  s.assignment = std::move(assignment);
  return s;
}

void Schedule::validate(const Instance& instance) const {
  const std::size_t n = instance.tasks();
  if (assignment.size() != n)
    throw StructuralError("assignment covers " + std::to_string(assignment.size()) +
                          " tasks, instance has " + std::to_string(n));
  if (order.size() > instance.workers())
    throw StructuralError("schedule has orders for " + std::to_string(order.size()) +
                          " workers, instance has " + std::to_string(instance.workers()));
  std::vector<char> seen(n, 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j : order[i]) {
      if (j >= n) throw StructuralError("order references unknown task " + std::to_string(j));
      if (seen[j]) throw StructuralError("task " + std::to_string(j) + " scheduled twice");
      seen[j] = 1;
      if (assignment[j] != i)
        throw StructuralError("task " + std::to_string(j) + " ordered on worker " +
                              std::to_string(i) + " but assigned to " +
                              std::to_string(assignment[j]));
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (assignment[j] >= instance.workers())
      throw StructuralError("task " + std::to_string(j) + " assigned to unknown worker " +
                            std::to_string(assignment[j]));
    if (!seen[j]) throw StructuralError("task " + std::to_string(j) + " missing from orders");
  }
}

Evaluation evaluate(const Instance& instance, const Schedule& schedule) {
  const auto overhead = instance.contact_times();
  return evaluate(instance, schedule, overhead);
}

Evaluation evaluate(const Instance& instance, const Schedule& schedule,
                    std::span<const double> overhead) {
  schedule.validate(instance);
  if (overhead.size() != instance.workers())
    throw std::invalid_argument("overhead vector must have one entry per worker");
  Evaluation ev;
  ev.completion.assign(instance.tasks(), 0.0);
  for (std::size_t i = 0; i < schedule.order.size(); ++i) {
    double t = overhead[i];
    for (std::size_t j : schedule.order[i]) {
      t += instance.rst(i, j);
      ev.completion[j] = t;
      ev.wct += instance.weight(j) * t;
    }
  }
  return ev;
}

double smith_ratio(double weight, double processing) {
  if (processing == 0.0) return std::numeric_limits<double>::infinity();
  return weight / processing;
}

bool higher_priority(double weight_first, double p_first, std::size_t first,
                     double weight_second, double p_second, std::size_t second) {
  const double a = smith_ratio(weight_first, p_first);
  const double b = smith_ratio(weight_second, p_second);
  if (a != b) return a > b;
  return first > second;
}

bool higher_priority(const Instance& instance, std::size_t worker, std::size_t first,
                     std::size_t second) {
  return higher_priority(instance.weight(first), instance.rst(worker, first), first,
                         instance.weight(second), instance.rst(worker, second), second);
}

std::vector<std::size_t> smith_order(const Instance& instance, std::size_t worker,
                                     std::vector<std::size_t> tasks) {
  if (worker >= instance.workers())
    throw StructuralError("unknown worker " + std::to_string(worker));
  std::sort(tasks.begin(), tasks.end(), [&](std::size_t a, std::size_t b) {
    return higher_priority(instance, worker, a, b);
  });
  return tasks;
}

std::vector<std::size_t> smith_order(const Instance& instance, std::size_t worker) {
  std::vector<std::size_t> all(instance.tasks());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  return smith_order(instance, worker, std::move(all));
}

double wctr(double wct, double lower_bound) {
  if (!(lower_bound > 0.0)) throw std::invalid_argument("lower bound must be positive");
  return wct / lower_bound;
}

}  // namespace crowdsched
