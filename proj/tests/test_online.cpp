#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crowdsched/lrf.hpp"
#include "crowdsched/online.hpp"
#include "crowdsched/oracle.hpp"
#include "crowdsched/random.hpp"
#include "test_support.hpp"

using namespace crowdsched;

namespace {

// Per-worker meeting times of a trace.
std::vector<std::vector<double>> by_worker(const MeetingTrace& trace, std::size_t m) {
  std::vector<std::vector<double>> out(m);
  for (const auto& e : trace.events) out[e.worker].push_back(e.time);
  return out;
}

MeetingTrace manual_trace(std::vector<Meeting> events, double horizon) {
  MeetingTrace t;
  t.events = std::move(events);
  t.horizon = horizon;
  return t;
}

}  // namespace

TEST_CASE("meeting gaps have mean phi") {
  const Instance inst({4.0}, {1.0}, {{1.0}});
  const auto trace = simulate_meetings(inst, 2024, 4.2e5);
  REQUIRE(trace.events.size() >= 100000);
  double prev = 0.0, sum = 0.0;
  for (std::size_t k = 0; k < 100000; ++k) {
    sum += trace.events[k].time - prev;
    prev = trace.events[k].time;
  }
  const double mean = sum / 1e5;
  CHECK(std::abs(mean - 4.0) <= 3.0 * 4.0 / std::sqrt(1e5));
}

TEST_CASE("simulated traces are sorted, reproducible and seed dependent") {
  std::mt19937_64 rng(5);
  const auto inst = testing::random_instance(rng, 6, 4);
  const auto a = simulate_meetings(inst, 9, 500.0);
  const auto b = simulate_meetings(inst, 9, 500.0);
  const auto c = simulate_meetings(inst, 10, 500.0);
  CHECK_NOTHROW(a.validate(inst.workers()));
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t k = 0; k < a.events.size(); ++k) {
    CHECK(a.events[k].time == b.events[k].time);
    CHECK(a.events[k].worker == b.events[k].worker);
  }
  CHECK((c.events.size() != a.events.size() || c.events.front().time != a.events.front().time));
}

TEST_CASE("short horizon may give an empty trace; nonpositive horizon is rejected") {
  const Instance inst({50.0}, {1.0}, {{1.0}});
  const auto t = simulate_meetings(inst, 1, 1e-9);
  CHECK(t.events.empty());
  CHECK_NOTHROW(t.validate(1));
  CHECK_THROWS_AS(simulate_meetings(inst, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(simulate_meetings(inst, 1, -3.0), std::invalid_argument);
}

TEST_CASE("trace validation") {
  CHECK_THROWS_AS(manual_trace({{2.0, 0}, {1.0, 0}}, 5.0).validate(1), std::invalid_argument);
  CHECK_THROWS_AS(manual_trace({{1.0, 2}}, 5.0).validate(2), std::invalid_argument);
  CHECK_THROWS_AS(manual_trace({{6.0, 0}}, 5.0).validate(1), std::invalid_argument);
  CHECK_THROWS_AS(manual_trace({{-1.0, 0}}, 5.0).validate(1), std::invalid_argument);
}

TEST_CASE("single worker: one meeting commits everything in Smith order") {
  const Instance inst({1.5}, {1.0, 3.0, 2.0}, {{2.0, 1.0, 4.0}});
  const auto trace = manual_trace({{1.0, 0}, {2.5, 0}, {10.0, 0}}, 20.0);
  const auto r = cosmos(inst, trace, offline_lrf(LrfVariant::Max));
  REQUIRE(r.finished());
  CHECK(r.steps.size() == 1);
  CHECK(r.order[0] == smith_order(inst, 0));
  // Smith order 1, 0, 2: processing ends at 2, 4, 8 after starting at 1.
  CHECK(r.completion[1] == doctest::Approx(2.5));
  CHECK(r.completion[0] == doctest::Approx(10.0));
  CHECK(r.completion[2] == doctest::Approx(10.0));
  CHECK(r.wct == doctest::Approx(3.0 * 2.5 + 1.0 * 10.0 + 2.0 * 10.0));
  CHECK(r.late_feedback.empty());
}

TEST_CASE("hand replay with LRF on two workers") {
  // Worker 1 met first at t = 1: loads are phi_1 = 2 and 2*1 - 1 = 1.
  // Ratio order 0, 1, 2 gives plan {0, 1, 1}; worker 1 takes tasks 1 and 2,
  // finishing them at 3 and 6, which its meetings at 3 and 8 report. Worker 0
  // gets task 0 at t = 2, done at 6, reported at 9.
  const auto inst = testing::lrf_example();
  const auto trace =
      manual_trace({{1.0, 1}, {2.0, 0}, {3.0, 1}, {5.0, 0}, {8.0, 1}, {9.0, 0}, {20.0, 1}}, 40.0);
  const auto r = cosmos(inst, trace, offline_lrf_identical());
  REQUIRE(r.finished());
  CHECK(r.assignment == std::vector<std::size_t>{0, 1, 1});
  CHECK(r.order[1] == std::vector<std::size_t>{1, 2});
  CHECK(r.completion == std::vector<double>{9.0, 3.0, 8.0});
  CHECK(r.wct == doctest::Approx(47.0));
  REQUIRE(r.steps.size() == 2);
  CHECK(r.steps[0].plan_value == doctest::Approx(31.0));
  CHECK(std::isnan(r.steps[0].inherited_value));
  CHECK(r.steps[1].plan_value == doctest::Approx(20.0));
  CHECK(r.steps[1].inherited_value == doctest::Approx(20.0));
  CHECK_FALSE(r.steps[1].kept_previous);
  const auto s = r.schedule();
  CHECK_NOTHROW(s.validate(inst));
}

TEST_CASE("missing feedback meeting falls back to horizon plus phi") {
  const auto inst = testing::lrf_example();
  const auto trace = manual_trace({{1.0, 1}, {2.0, 0}, {3.0, 1}}, 10.0);
  const auto r = cosmos(inst, trace, offline_lrf_identical());
  REQUIRE(r.finished());
  CHECK(r.completion[1] == 3.0);
  CHECK(r.completion[2] == doctest::Approx(12.0));  // 10 + phi_1
  CHECK(r.completion[0] == doctest::Approx(11.0));  // 10 + phi_0
  CHECK(r.late_feedback == std::vector<std::size_t>{0, 2});
}

TEST_CASE("exhausted trace reports the unfinished tasks") {
  const auto inst = testing::lrf_example();
  const auto r = cosmos(inst, manual_trace({{1.0, 1}}, 5.0), offline_lrf_identical());
  CHECK_FALSE(r.finished());
  CHECK(r.unfinished == std::vector<std::size_t>{0});
  CHECK(r.assignment[0] == OnlineResult::kUnassigned);
  CHECK_THROWS_AS(r.schedule(), std::logic_error);
  const auto none = cosmos(inst, manual_trace({}, 5.0), offline_lrf_identical());
  CHECK(none.unfinished == std::vector<std::size_t>{0, 1, 2});
  CHECK(none.wct == 0.0);
}

TEST_CASE("conservation and realized wct") {
  std::mt19937_64 rng(77);
  for (int run = 0; run < 40; ++run) {
    const auto inst = testing::random_instance(rng, 5, 12);
    const double horizon = run % 3 == 0 ? 8.0 : 2000.0;
    const auto trace = simulate_meetings(inst, run, horizon);
    const auto r = cosmos(inst, trace, offline_lrf(LrfVariant::Mean));
    std::vector<int> seen(inst.tasks(), 0);
    for (const auto& seq : r.order)
      for (std::size_t j : seq) ++seen[j];
    for (std::size_t j : r.unfinished) ++seen[j];
    for (int c : seen) CHECK(c == 1);
    double wct = 0.0;
    for (std::size_t j = 0; j < inst.tasks(); ++j)
      if (r.assignment[j] != OnlineResult::kUnassigned) wct += inst.weight(j) * r.completion[j];
    CHECK(r.wct == doctest::Approx(wct).epsilon(1e-12));
    // Every completion is a meeting of the worker after its processing ends.
    const auto meets = by_worker(trace, inst.workers());
    for (std::size_t i = 0; i < inst.workers(); ++i) {
      double clock = 0.0;
      bool first = true;
      for (std::size_t j : r.order[i]) {
        if (first) clock = r.start[j];
        first = false;
        clock += inst.rst(i, j);
        const double c = r.completion[j];
        CHECK(c >= clock - 1e-12);
        const bool late = std::binary_search(r.late_feedback.begin(), r.late_feedback.end(), j);
        if (!late) CHECK(std::find(meets[i].begin(), meets[i].end(), c) != meets[i].end());
      }
    }
  }
}

TEST_CASE("EDTS planner runs and accepts negative loads") {
  std::mt19937_64 rng(3);
  for (int run = 0; run < 10; ++run) {
    const auto inst = testing::random_instance(rng, 4, 8);
    const auto trace = simulate_meetings(inst, 100 + run, 5000.0);
    const auto r = cosmos(inst, trace, offline_edts());
    CHECK(r.finished());
  }
}

TEST_CASE("guarded plans never exceed the inherited value") {
  std::size_t unguarded_violations = 0, steps = 0;
  for (std::uint64_t run = 0; run < 30; ++run) {
    Rng rng(derive_seed(11, {run}));
    const auto inst = testing::random_instance(rng, 6, 25);
    const auto trace = simulate_meetings(inst, run, 1e4);
    for (const bool guard : {true, false}) {
      const auto r = cosmos(inst, trace, offline_lrf(LrfVariant::Max), {guard});
      for (const auto& s : r.steps) {
        if (std::isnan(s.inherited_value)) continue;
        if (guard) {
          CHECK(s.plan_value <= s.inherited_value);
        } else {
          ++steps;
          if (s.plan_value > s.inherited_value + 1e-9 * std::abs(s.inherited_value))
            ++unguarded_violations;
        }
      }
    }
  }
  MESSAGE("unguarded LRF-MAX re-plans worse than inherited: " << unguarded_violations << "/" << steps);
  CHECK(unguarded_violations > 0);  // the guard is not vacuous
}

TEST_CASE("competitive bound on tiny identical instances") {
  // Mean realized WCT over many traces against alpha (1 + Phi_max sum w /
  // sum w (Phi_min + p)), Phi = 2 phi, alpha = offline LRF / OPT.
  std::mt19937_64 rng(404);
  double worst = 0.0;
  for (int k = 0; k < 40; ++k) {
    const std::size_t m = 1 + k % 3, n = 1 + k % 6;
    const auto inst = testing::random_identical_instance(rng, m, n, 1.0, 15.0);
    const double opt = brute_force_opt(inst).wct;
    const double alpha = evaluate(inst, lrf_identical(inst)).wct / opt;
    const auto phis = inst.contact_times();
    const double pmax = *std::max_element(phis.begin(), phis.end());
    const double pmin = *std::min_element(phis.begin(), phis.end());
    double sw = 0.0, den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sw += inst.weight(j);
      den += inst.weight(j) * (pmin + inst.rst(0, j));
    }
    const double bound = alpha * (1.0 + pmax * sw / den);
    double mean = 0.0;
    const int traces = 300;
    for (int t = 0; t < traces; ++t) {
      const auto r = cosmos(inst, simulate_meetings(inst, derive_seed(k, {std::uint64_t(t)}), 1e4),
                            offline_lrf_identical());
      REQUIRE(r.finished());
      mean += r.wct / traces;
    }
    worst = std::max(worst, mean / opt / bound);
    CHECK(mean / opt <= bound + 1e-6);
  }
  MESSAGE("largest realized/OPT as a fraction of the bound: " << worst);
}
