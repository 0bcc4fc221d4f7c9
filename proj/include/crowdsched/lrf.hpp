#pragma once

#include <span>
#include <string_view>

#include "crowdsched/core.hpp"

namespace crowdsched {

/// Proxy processing time used to rank tasks when workers are unrelated.
enum class LrfVariant { Max, Min, Mean };

std::string_view to_string(LrfVariant v);
LrfVariant parse_lrf_variant(std::string_view name);

/// Largest-Ratio-First on identical workers: tasks in non-increasing w_j/p_j
/// order, each appended to the worker with the smallest expected workload
/// (initially 2*phi_i). Throws std::invalid_argument when the RST matrix has
/// a column that differs across workers.
Schedule lrf_identical(const Instance& instance);
/// Same, starting the workloads from `initial_load` instead of 2*phi_i.
Schedule lrf_identical(const Instance& instance, std::span<const double> initial_load);

/// LRF baseline for unrelated workers. Tasks are ranked with the proxy
/// p_j = max/min/mean over workers, then each goes to the worker that
/// finishes it first under the true p_ij.
Schedule lrf_variant(const Instance& instance, LrfVariant variant);
Schedule lrf_variant(const Instance& instance, LrfVariant variant,
                     std::span<const double> initial_load);

}  // namespace crowdsched
