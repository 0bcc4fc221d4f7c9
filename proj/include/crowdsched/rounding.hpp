#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "crowdsched/core.hpp"
#include "crowdsched/lp.hpp"

namespace crowdsched {

/// Worker i dominates task j when y_ij > 1/2.
bool dominates(const FractionalSolution& solution, std::size_t worker, std::size_t task);

/// Per-task marginals y_ij rescaled so that sum_i y_ij = 1 exactly.
/// Throws std::invalid_argument when a task's raw sum is off by > 1e-6.
std::vector<double> normalized_marginals(const FractionalSolution& solution);

/// Tasks committed so far (the set P with its z_ij indicators).
class PartialAssignment {
 public:
  static constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

  explicit PartialAssignment(std::size_t tasks = 0) : worker_(tasks, kUnassigned) {}

  std::size_t tasks() const { return worker_.size(); }
  bool assigned(std::size_t j) const { return worker_.at(j) != kUnassigned; }
  std::size_t worker_of(std::size_t j) const { return worker_.at(j); }
  /// z_ij
  double z(std::size_t i, std::size_t j) const { return worker_.at(j) == i ? 1.0 : 0.0; }
  /// 1 - sum_i z_ij
  double zbar(std::size_t j) const { return assigned(j) ? 0.0 : 1.0; }
  void assign(std::size_t j, std::size_t i);

 private:
  std::vector<std::size_t> worker_;
};

struct RoundedAssignment {
  std::vector<std::size_t> sigma;  // task -> worker
  std::vector<std::size_t> slot;   // chosen rectangle
  std::vector<double> start;       // its start time
  std::vector<double> tau;         // offset in [0, p]
  std::vector<double> theta;       // sequencing key
};

/// Each task picks one of its rectangles with probability x_ijl, then a
/// uniform offset tau_j in [0, p_ij]; theta_j = start + tau_j. Task j draws
/// from its own stream derive_seed(seed, {j}).
RoundedAssignment independent_round(const FractionalSolution& solution, const Instance& instance,
                                    std::uint64_t seed);

/// Randomized sequencing: theta_j = (1+alpha) start_j + tau_j, plus
/// 0.2 p_ij when the chosen worker dominates j. Each worker runs its tasks
/// by non-decreasing theta, ties broken by a random key.
Schedule rts(const FractionalSolution& solution, const Instance& instance, std::uint64_t seed,
             double alpha = 0.3, RoundedAssignment* rounded = nullptr);

/// E[C_j | sigma(j) = i, P] under independent rounding and Smith order on
/// each worker. For j in P, i must be its worker.
double expected_completion_independent(const FractionalSolution& solution, const Instance& instance,
                                       std::size_t worker, std::size_t task,
                                       const PartialAssignment& partial);

/// sum_q w_q E[C_q | P], recomputed from scratch in O(m n log n). An
/// empty `overhead` means 2*phi_i.
double expected_objective_independent(const FractionalSolution& solution, const Instance& instance,
                                      const PartialAssignment& partial,
                                      std::span<const double> overhead = {});

/// Potential after 0, 1, ..., n commitments.
struct DerandomizationTrace {
  std::vector<double> potential;
};

/// Derandomized independent rounding: tasks committed in index order to the
/// worker minimising the conditional expected objective (lowest index on
/// ties); each worker then runs its tasks in Smith order. O(m n^2).
/// `overhead` replaces 2*phi_i when non-empty (online re-planning).
Schedule edts(const FractionalSolution& solution, const Instance& instance,
              DerandomizationTrace* trace = nullptr, std::span<const double> overhead = {});

/// Fractional partition of one worker's rectangles into groups of total
/// mass at most 1. mass[u][j] is y_uj.
struct Grouping {
  std::size_t worker = 0;
  std::vector<std::vector<double>> mass;

  std::size_t groups() const { return mass.size(); }
  /// sum_u y_uj
  double total(std::size_t task) const;
};

/// Sweeps the worker's rectangles by start time (then task, then slot) and
/// opens a new group whenever the next rectangle would push the mass past 1,
/// splitting that rectangle across the boundary.
Grouping build_grouping(const FractionalSolution& solution, std::size_t worker);
std::vector<Grouping> build_groupings(const FractionalSolution& solution);

inline constexpr double kDefaultEta = 0.1561;

/// E[C_j | sigma(j) = u, P] for group u of groupings[i]. Unassigned j, or j
/// committed to worker i. Non-dominated pairs inside u are discounted by
/// (1 - eta).
double expected_completion_grouped(const Instance& instance, const std::vector<Grouping>& groupings,
                                   std::size_t worker, std::size_t group, std::size_t task,
                                   const PartialAssignment& partial, double eta = kDefaultEta);

/// E[C_j | P]: mixture over j's groups (over its worker's groups with
/// weights y_uj / y_ij once j is committed).
double expected_completion_grouped(const Instance& instance, const std::vector<Grouping>& groupings,
                                   std::size_t task, const PartialAssignment& partial,
                                   double eta = kDefaultEta);

/// sum_q w_q E[C_q | P] under the grouped formulas.
double grouped_expected_objective(const Instance& instance, const std::vector<Grouping>& groupings,
                                  const PartialAssignment& partial, double eta = kDefaultEta);

/// Derandomization over the grouped formulas; same commit order, tie rule
/// and final Smith order as edts. The trace is recomputed from scratch at
/// each step, which costs O(m n^2) per step.
Schedule dts(const Instance& instance, const std::vector<Grouping>& groupings,
             double eta = kDefaultEta, DerandomizationTrace* trace = nullptr);

}  // namespace crowdsched
