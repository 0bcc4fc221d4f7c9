#include "crowdsched/oracle.hpp"

#include <algorithm>
#include <limits>

namespace crowdsched {
namespace {

constexpr double kMaxAssignments = 1e7;

// Best order for one worker and its WCT (overhead included).
std::pair<std::vector<std::size_t>, double> best_order(const Instance& inst, std::size_t i,
                                                       std::vector<std::size_t> tasks,
                                                       bool exhaust) {
  auto cost = [&](const std::vector<std::size_t>& seq) {
    double t = inst.worker(i).contact_time(), sum = 0.0;
    for (std::size_t j : seq) {
      t += inst.rst(i, j);
      sum += inst.weight(j) * t;
    }
    return sum;
  };
  auto smith = smith_order(inst, i, tasks);
  double best = cost(smith);
  if (!exhaust) return {std::move(smith), best};
  std::vector<std::size_t> winner = smith;
  std::sort(tasks.begin(), tasks.end());
  do {
    const double c = cost(tasks);
    if (c < best) {
      best = c;
      winner = tasks;
    }
  } while (std::next_permutation(tasks.begin(), tasks.end()));
  return {std::move(winner), best};
}

}  // namespace

OracleResult brute_force_opt(const Instance& instance, bool exhaust_orders) {
  const std::size_t m = instance.workers();
  const std::size_t n = instance.tasks();
  double count = 1.0;
  for (std::size_t j = 0; j < n; ++j) count *= static_cast<double>(m);
  if (count > kMaxAssignments)
    throw ResourceError("brute force needs " + std::to_string(m) + "^" + std::to_string(n) +
                        " assignments, limit is 1e7");
  if (exhaust_orders && n > 6)
    throw ResourceError("permutation search is limited to n <= 6");

  std::vector<std::size_t> a(n, 0);
  std::vector<std::size_t> best_a = a;
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::vector<std::size_t>> per(m);
  while (true) {
    for (auto& v : per) v.clear();
    for (std::size_t j = 0; j < n; ++j) per[a[j]].push_back(j);
    double total = 0.0;
    for (std::size_t i = 0; i < m && total < best; ++i)
      if (!per[i].empty()) total += best_order(instance, i, per[i], exhaust_orders).second;
    if (total < best) {
      best = total;
      best_a = a;
    }
    // Odometer with the last task as the fastest digit: lexicographic order.
    std::size_t k = n;
    while (k > 0 && a[k - 1] + 1 == m) a[--k] = 0;
    if (k == 0) break;
    ++a[k - 1];
  }

  OracleResult out;
  out.schedule.assignment = best_a;
  out.schedule.order.resize(m);
  for (std::size_t j = 0; j < n; ++j) out.schedule.order[best_a[j]].push_back(j);
  for (std::size_t i = 0; i < m; ++i)
    out.schedule.order[i] = best_order(instance, i, out.schedule.order[i], exhaust_orders).first;
  out.wct = n == 0 ? 0.0 : best;
  return out;
}

}  // namespace crowdsched
