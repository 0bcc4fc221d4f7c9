#include "crowdsched/lrf.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace crowdsched {

namespace {

std::vector<std::size_t> proxy_order(const Instance& instance, std::span<const double> proxy) {
  std::vector<std::size_t> order(instance.tasks());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return higher_priority(instance.weight(a), proxy[a], a, instance.weight(b), proxy[b], b);
  });
  return order;
}

void check_load(const Instance& instance, std::span<const double> initial_load) {
  if (initial_load.size() != instance.workers())
    throw std::invalid_argument("initial load must have one entry per worker");
}

// Per-worker order on the final schedule follows the assignment sequence,
// which is already the proxy ratio order.
Schedule finish(const Instance& instance, std::vector<std::size_t> assignment,
                std::vector<std::vector<std::size_t>> order) {
  Schedule s{std::move(assignment), std::move(order)};
  s.validate(instance);
  return s;
}

}  // namespace

std::string_view to_string(LrfVariant v) {
  switch (v) {
    case LrfVariant::Max: return "LRF-MAX";
    case LrfVariant::Min: return "LRF-MIN";
    case LrfVariant::Mean: return "LRF-MEAN";
  }
  return "LRF-?";
}

LrfVariant parse_lrf_variant(std::string_view name) {
  if (name == "LRF-MAX" || name == "MAX" || name == "max") return LrfVariant::Max;
  if (name == "LRF-MIN" || name == "MIN" || name == "min") return LrfVariant::Min;
  if (name == "LRF-MEAN" || name == "MEAN" || name == "mean") return LrfVariant::Mean;
  throw std::invalid_argument("unknown LRF variant '" + std::string(name) + "'");
}

Schedule lrf_identical(const Instance& instance) {
  const auto load = instance.contact_times();
  return lrf_identical(instance, load);
}

Schedule lrf_identical(const Instance& instance, std::span<const double> initial_load) {
  check_load(instance, initial_load);
  if (!instance.identical_workers())
    throw std::invalid_argument("lrf_identical requires p_ij to be equal across workers");
  const std::size_t m = instance.workers();
  std::vector<double> proxy(instance.tasks());
  for (std::size_t j = 0; j < proxy.size(); ++j) proxy[j] = instance.rst(0, j);

  std::vector<double> ew(initial_load.begin(), initial_load.end());
  std::vector<std::size_t> assignment(instance.tasks());
  std::vector<std::vector<std::size_t>> order(m);
  for (std::size_t j : proxy_order(instance, proxy)) {
    // min_element returns the first minimum, i.e. the lowest worker index.
    const auto best = static_cast<std::size_t>(std::min_element(ew.begin(), ew.end()) - ew.begin());
    assignment[j] = best;
    order[best].push_back(j);
    ew[best] += proxy[j];
  }
  return finish(instance, std::move(assignment), std::move(order));
}

Schedule lrf_variant(const Instance& instance, LrfVariant variant) {
  const auto load = instance.contact_times();
  return lrf_variant(instance, variant, load);
}

Schedule lrf_variant(const Instance& instance, LrfVariant variant,
                     std::span<const double> initial_load) {
  check_load(instance, initial_load);
  const std::size_t m = instance.workers();
  const std::size_t n = instance.tasks();
  std::vector<double> proxy(n);
  for (std::size_t j = 0; j < n; ++j) {
    double lo = instance.rst(0, j), hi = lo, sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double p = instance.rst(i, j);
      lo = std::min(lo, p);
      hi = std::max(hi, p);
      sum += p;
    }
    switch (variant) {
      case LrfVariant::Max: proxy[j] = hi; break;
      case LrfVariant::Min: proxy[j] = lo; break;
      case LrfVariant::Mean: proxy[j] = sum / static_cast<double>(m); break;
    }
  }

  std::vector<double> ew(initial_load.begin(), initial_load.end());
  std::vector<std::size_t> assignment(n);
  std::vector<std::vector<std::size_t>> order(m);
  for (std::size_t j : proxy_order(instance, proxy)) {
    std::size_t best = 0;
    double best_finish = ew[0] + instance.rst(0, j);
    for (std::size_t i = 1; i < m; ++i) {
      const double f = ew[i] + instance.rst(i, j);
      if (f < best_finish) {
        best_finish = f;
        best = i;
      }
    }
    assignment[j] = best;
    order[best].push_back(j);
    ew[best] = best_finish;
  }
  return finish(instance, std::move(assignment), std::move(order));
}

}  // namespace crowdsched
