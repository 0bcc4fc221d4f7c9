#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace crowdsched {

// Raised when a schedule or partial assignment does not fit the instance
// it is evaluated against (wrong sizes, out-of-range worker, duplicated task).
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a requested computation exceeds a configured size guard or
// iteration budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. `line()` is 1-based, 0 when not line oriented.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct WorkerProfile {
  std::size_t id = 0;
  double phi = 1.0;  // expected inter-contact time with the requester

  // Total contact time: one meeting to hand out work, one for feedback.
  double contact_time() const { return 2.0 * phi; }
};

struct TaskProfile {
  std::size_t id = 0;
  double weight = 0.0;
};

/// A scheduling problem: m workers, n tasks and the m x n matrix of
/// required service times (row = worker, column = task).
class Instance {
 public:
  Instance() = default;
  Instance(std::vector<double> phi, std::vector<double> weights,
           std::vector<std::vector<double>> rst);

  std::size_t workers() const { return workers_.size(); }
  std::size_t tasks() const { return tasks_.size(); }

  const WorkerProfile& worker(std::size_t i) const { return workers_.at(i); }
  const TaskProfile& task(std::size_t j) const { return tasks_.at(j); }
  std::span<const WorkerProfile> worker_profiles() const { return workers_; }
  std::span<const TaskProfile> task_profiles() const { return tasks_; }

  double phi(std::size_t i) const { return workers_[i].phi; }
  double weight(std::size_t j) const { return tasks_[j].weight; }
  double rst(std::size_t i, std::size_t j) const { return rst_[i * tasks_.size() + j]; }

  std::vector<double> phis() const;
  std::vector<double> weights() const;
  std::vector<std::vector<double>> rst_rows() const;

  /// Per-worker overhead charged to every task's completion: 2*phi_i.
  std::vector<double> contact_times() const;

  /// True when every column of the RST matrix is constant across workers.
  bool identical_workers() const;

  /// Instance restricted to the given workers and tasks, in the given order.
  Instance subset(std::span<const std::size_t> worker_ids,
                  std::span<const std::size_t> task_ids) const;

 private:
  std::vector<WorkerProfile> workers_;
  std::vector<TaskProfile> tasks_;
  std::vector<double> rst_;  // row-major m x n
};

/// Task-to-worker assignment plus the processing order on each worker.
struct Schedule {
  std::vector<std::size_t> assignment;         // task -> worker
  std::vector<std::vector<std::size_t>> order;  // worker -> tasks in processing order

  /// Builds a schedule from an assignment, ordering every worker by Smith's rule.
  static Schedule from_assignment(const Instance& instance,
                                  std::vector<std::size_t> assignment);

  void validate(const Instance& instance) const;
};

struct Evaluation {
  std::vector<double> completion;
  double wct = 0.0;
};

/// Completion times C_j = overhead_i + processing of j and its predecessors.
Evaluation evaluate(const Instance& instance, const Schedule& schedule);
/// Same, with an explicit per-worker overhead replacing 2*phi_i.
Evaluation evaluate(const Instance& instance, const Schedule& schedule,
                    std::span<const double> overhead);

/// Smith ratio w_j / p_ij; +inf when p_ij == 0.
double smith_ratio(double weight, double processing);

/// Strict priority of task `first` over task `second` on `worker`: larger
/// Smith ratio wins, equal ratios go to the larger task index.
bool higher_priority(const Instance& instance, std::size_t worker, std::size_t first,
                     std::size_t second);

/// Same relation with an explicit per-task processing time (used by the
/// identical-worker LRF proxies).
bool higher_priority(double weight_first, double p_first, std::size_t first,
                     double weight_second, double p_second, std::size_t second);

std::vector<std::size_t> smith_order(const Instance& instance, std::size_t worker,
                                     std::vector<std::size_t> tasks);

/// All tasks of the instance in worker `worker`'s priority order.
std::vector<std::size_t> smith_order(const Instance& instance, std::size_t worker);

double wctr(double wct, double lower_bound);

}  // namespace crowdsched
