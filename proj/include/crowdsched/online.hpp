#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "crowdsched/core.hpp"
#include "crowdsched/lrf.hpp"

namespace crowdsched {

struct Meeting {
  double time = 0.0;
  std::size_t worker = 0;
};

/// Time-ordered requester-worker meetings observed up to `horizon`.
struct MeetingTrace {
  std::vector<Meeting> events;
  double horizon = 0.0;

  /// Throws std::invalid_argument when times decrease, a time is negative
  /// or beyond the horizon, or a worker index is >= workers.
  void validate(std::size_t workers) const;
};

/// Exponential inter-meeting gaps with mean phi_i per worker, merged in time
/// order (ties by worker index). Worker i draws from derive_seed(seed, {i}).
MeetingTrace simulate_meetings(const Instance& instance, std::uint64_t seed, double horizon);

/// Offline planner for the remaining tasks: gets the sub-instance of active
/// workers x remaining tasks and each active worker's starting workload, and
/// returns one worker (sub-instance index) per task.
using OfflinePlanner =
    std::function<std::vector<std::size_t>(const Instance&, std::span<const double> overhead)>;

OfflinePlanner offline_lrf_identical();
OfflinePlanner offline_lrf(LrfVariant variant);
/// Interval LP (mean-busy objective) with the given overheads, then EDTS.
OfflinePlanner offline_edts(double epsilon = 3.0);

struct CosmosOptions {
  /// Keep the previous plan for the remaining tasks when the re-plan is
  /// worse under the current loads. Heuristic planners (LRF, EDTS) do not
  /// guarantee this on their own.
  bool monotone_guard = true;
};

struct CosmosStep {
  double time = 0.0;
  std::size_t worker = 0;
  std::size_t remaining = 0;   // tasks before this step's commitment
  std::size_t committed = 0;   // tasks given to `worker`
  double plan_value = 0.0;     // planned WCT of the remaining tasks
  /// Previous plan restricted to the same tasks, under this step's loads;
  /// NaN at the first step.
  double inherited_value = 0.0;
  bool kept_previous = false;  // monotone guard fired
};

struct OnlineResult {
  static constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);

  std::vector<std::size_t> assignment;              // kUnassigned when unfinished
  std::vector<std::vector<std::size_t>> order;      // per worker, Smith order
  std::vector<double> completion;                   // realized C_j, 0 when unfinished
  std::vector<double> start;                        // meeting time at which j was handed over
  double wct = 0.0;                                 // sum over committed tasks
  std::vector<std::size_t> unfinished;              // never handed over
  std::vector<std::size_t> late_feedback;           // feedback after the trace end
  std::vector<CosmosStep> steps;

  bool finished() const { return unfinished.empty(); }
  /// Throws std::logic_error when unfinished.
  Schedule schedule() const;
};

/// Online re-planning driven by the trace. At a meeting with an active
/// worker i at time t: loads are phi_i for i and 2 phi_k - t for the other
/// active workers; the planner assigns every remaining task and only i's
/// share is handed over (Smith order). i then leaves the active set.
/// Task j handed to i at time t finishes processing at t + prefix and
/// completes at i's first meeting at or after that; without one, at
/// max(horizon, end of processing) + phi_i, the expected next meeting
/// (listed in late_feedback).
OnlineResult cosmos(const Instance& instance, const MeetingTrace& trace, const OfflinePlanner& offline,
                    const CosmosOptions& options = {});

/// Planned WCT of `assignment` (sub-instance indices) with per-worker Smith
/// order and the given starting loads.
double plan_value(const Instance& instance, std::span<const std::size_t> assignment,
                  std::span<const double> overhead);

}  // namespace crowdsched
