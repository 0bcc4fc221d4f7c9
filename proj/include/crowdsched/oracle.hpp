#pragma once

#include "crowdsched/core.hpp"

namespace crowdsched {

struct OracleResult {
  Schedule schedule;
  double wct = 0.0;
};

/// Exact optimum by enumerating all m^n assignments in lexicographic order
/// (the first minimiser wins). Per-worker order is Smith order, or the best
/// of all permutations when `exhaust_orders` is set.
/// Throws ResourceError when m^n > 1e7, or n > 6 with `exhaust_orders`.
OracleResult brute_force_opt(const Instance& instance, bool exhaust_orders = false);

}  // namespace crowdsched
