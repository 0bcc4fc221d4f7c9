#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crowdsched/core.hpp"
#include "crowdsched/simplex.hpp"

namespace crowdsched {

enum class LpKind { TimeIndexed, IntervalIndexed };

/// Objective coefficient used by the interval-indexed relaxation.
///  MeanBusy: w_j (overhead_i + t_l + p_ij / 2), no variables forbidden.
///            x_ijl is the share of j processed inside interval l; a valid
///            lower bound on every schedule.
///  Literal:  w_j (overhead_i + t_l + p_ij), x_ijl forbidden when
///            p_ij > t_{l+1}. Tighter but not always a lower bound.
enum class IntervalObjective { MeanBusy, Literal };

std::string to_string(IntervalObjective o);
IntervalObjective parse_interval_objective(const std::string& name);

struct LpVariable {
  std::size_t worker = 0;
  std::size_t task = 0;
  std::size_t slot = 0;
};

/// Triple-indexed relaxation. `program` column k corresponds to vars[k];
/// rows 0..n-1 are the assignment rows, the rest capacity rows.
struct LpModel {
  LpKind kind = LpKind::IntervalIndexed;
  std::size_t workers = 0;
  std::size_t tasks = 0;
  /// Slot l spans [slot_start[l], slot_end[l]).
  std::vector<double> slot_start;
  std::vector<double> slot_end;
  std::vector<LpVariable> vars;
  LinearProgram program;
};

/// Unit slots s = 0..T-1. Requires integer p_ij.
LpModel build_time_indexed(const Instance& instance, std::size_t horizon);

/// Geometric points t_0 = 0, t_l = (1+eps)^(l-1), t_{L+1} = (1+eps)^L with
/// L the smallest integer such that (1+eps)^L >= sum_j max_i p_ij.
LpModel build_interval_indexed(const Instance& instance, double epsilon,
                               IntervalObjective objective = IntervalObjective::MeanBusy);
/// Same with explicit per-worker overheads in place of 2*phi_i.
LpModel build_interval_indexed(const Instance& instance, double epsilon,
                               IntervalObjective objective, std::span<const double> overhead);

/// Geometric interval endpoints t_0..t_{L+1} as defined above.
std::vector<double> interval_points(double total_processing, double epsilon);

struct FractionalEntry {
  std::size_t worker = 0;
  std::size_t task = 0;
  std::size_t slot = 0;
  double value = 0.0;
};

/// LP solution restricted to its positive entries ("rectangles").
class FractionalSolution {
 public:
  FractionalSolution() = default;
  FractionalSolution(std::size_t workers, std::size_t tasks, std::vector<double> slot_start,
                     std::vector<FractionalEntry> entries, double objective = 0.0);

  std::size_t workers() const { return workers_; }
  std::size_t tasks() const { return tasks_; }
  const std::vector<double>& slot_start() const { return slot_start_; }
  double start(std::size_t slot) const { return slot_start_.at(slot); }
  const std::vector<FractionalEntry>& entries() const { return entries_; }
  double objective() const { return objective_; }
  /// y_ij = sum_l x_ijl.
  double y(std::size_t i, std::size_t j) const { return y_[i * tasks_ + j]; }
  /// Entries of task j, in slot order then worker order.
  const std::vector<std::size_t>& task_entries(std::size_t j) const { return by_task_[j]; }

  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double complementarity = 0.0;
  std::size_t iterations = 0;

 private:
  std::size_t workers_ = 0;
  std::size_t tasks_ = 0;
  std::vector<double> slot_start_;
  std::vector<FractionalEntry> entries_;
  std::vector<double> y_;
  std::vector<std::vector<std::size_t>> by_task_;
  double objective_ = 0.0;
};

/// Solution of an integral schedule expressed in the given model's slots:
/// each task placed in the slot containing its start (time-indexed) or
/// with its processing spread over the intervals it overlaps (interval).
FractionalSolution integral_solution(const LpModel& model, const Instance& instance,
                                     const Schedule& schedule);

struct LpSolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  FractionalSolution solution;
};

/// Solve with the embedded simplex. Entries below 1e-12 are dropped.
LpSolveResult solve(const LpModel& model, double tolerance = 1e-7);

/// Optimum of the interval-indexed relaxation. Throws ResourceError when
/// the solver does not reach optimality.
double lower_bound(const Instance& instance, double epsilon,
                   IntervalObjective objective = IntervalObjective::MeanBusy);

/// CPLEX LP text. Numbers use shortest round-trip formatting; rows and
/// columns appear in model order.
void export_model(std::ostream& out, const LinearProgram& program);
std::string export_model(const LinearProgram& program);
/// Reads the subset of the LP format written by export_model.
LinearProgram import_model(std::istream& in);

}  // namespace crowdsched
