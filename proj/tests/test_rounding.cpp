#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "crowdsched/lp.hpp"
#include "crowdsched/rounding.hpp"
#include "test_support.hpp"

using namespace crowdsched;

namespace {

// Random fractional solution: each task spreads unit mass over a few
// (worker, slot) rectangles. Capacity rows are not enforced; the formulas
// under test only use the marginals.
FractionalSolution random_fractional(std::mt19937_64& rng, const Instance& inst, std::size_t slots) {
  std::vector<double> starts(slots);
  for (std::size_t l = 0; l < slots; ++l) starts[l] = l == 0 ? 0.0 : std::pow(4.0, double(l) - 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pw(0, inst.workers() - 1), ps(0, slots - 1), cnt(1, 4);
  std::vector<FractionalEntry> entries;
  for (std::size_t j = 0; j < inst.tasks(); ++j) {
    const std::size_t k = cnt(rng);
    std::vector<double> w(k);
    double s = 0.0;
    for (auto& v : w) s += (v = 0.05 + u(rng));
    for (std::size_t a = 0; a < k; ++a) entries.push_back({pw(rng), j, ps(rng), w[a] / s});
  }
  return FractionalSolution(inst.workers(), inst.tasks(), starts, entries);
}

FractionalSolution integral_of(const Instance& inst, const std::vector<std::size_t>& a) {
  std::vector<FractionalEntry> entries;
  for (std::size_t j = 0; j < a.size(); ++j) entries.push_back({a[j], j, j % 2, 1.0});
  return FractionalSolution(inst.workers(), inst.tasks(), {0.0, 1.0}, entries);
}

// Completion times under a sampled assignment with Smith order per worker.
std::vector<double> smith_completions(const Instance& inst, const std::vector<std::size_t>& sigma) {
  return evaluate(inst, Schedule::from_assignment(inst, sigma)).completion;
}

}  // namespace

TEST_CASE("dominance is strict") {
  Instance inst({1.0, 1.0}, {1.0, 1.0, 1.0}, {{1, 1, 1}, {1, 1, 1}});
  FractionalSolution s(2, 3, {0.0}, {{0, 0, 0, 0.6}, {1, 0, 0, 0.4}, {0, 1, 0, 0.5}, {1, 1, 0, 0.5},
                                     {1, 2, 0, 1.0}});
  CHECK(dominates(s, 0, 0));
  CHECK_FALSE(dominates(s, 0, 1));
  CHECK_FALSE(dominates(s, 0, 2));
}

TEST_CASE("marginals must sum to one") {
  Instance inst({1.0, 1.0}, {1.0}, {{1}, {1}});
  FractionalSolution bad(2, 1, {0.0}, {{0, 0, 0, 0.5}, {1, 0, 0, 0.49}});
  CHECK_THROWS_AS(independent_round(bad, inst, 1), std::invalid_argument);
  CHECK_THROWS_AS(edts(bad, inst), std::invalid_argument);
  FractionalSolution close(2, 1, {0.0}, {{0, 0, 0, 0.5}, {1, 0, 0, 0.5 + 1e-8}});
  CHECK_NOTHROW(independent_round(close, inst, 1));
}

TEST_CASE("independent rounding of an integral solution is deterministic") {
  std::mt19937_64 rng(1);
  auto inst = testing::random_instance(rng, 3, 7);
  std::vector<std::size_t> a(inst.tasks());
  for (std::size_t j = 0; j < a.size(); ++j) a[j] = j % inst.workers();
  auto sol = integral_of(inst, a);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto r = independent_round(sol, inst, seed);
    CHECK(r.sigma == a);
    for (std::size_t j = 0; j < a.size(); ++j) {
      CHECK(r.tau[j] >= 0.0);
      CHECK(r.tau[j] <= inst.rst(a[j], j));
      CHECK(r.theta[j] == r.start[j] + r.tau[j]);
    }
  }
}

TEST_CASE("rounding is reproducible from the seed") {
  std::mt19937_64 rng(2);
  auto inst = testing::random_instance(rng, 3, 8);
  auto sol = random_fractional(rng, inst, 4);
  auto a = independent_round(sol, inst, 99);
  auto b = independent_round(sol, inst, 99);
  CHECK(a.sigma == b.sigma);
  CHECK(a.theta == b.theta);
  CHECK(rts(sol, inst, 5).order == rts(sol, inst, 5).order);
}

TEST_CASE("empirical marginals match y") {
  std::mt19937_64 rng(3);
  auto inst = testing::random_instance(rng, 3, 5);
  auto sol = random_fractional(rng, inst, 3);
  const int trials = 20000;
  std::vector<int> hits(inst.workers() * inst.tasks(), 0);
  for (int t = 0; t < trials; ++t) {
    auto r = independent_round(sol, inst, static_cast<std::uint64_t>(t));
    for (std::size_t j = 0; j < inst.tasks(); ++j) ++hits[r.sigma[j] * inst.tasks() + j];
  }
  for (std::size_t i = 0; i < inst.workers(); ++i)
    for (std::size_t j = 0; j < inst.tasks(); ++j) {
      const double y = sol.y(i, j);
      if (y < 0.02) continue;
      const double sd = std::sqrt(trials * y * (1.0 - y));
      CHECK(std::abs(hits[i * inst.tasks() + j] - trials * y) <= 3.0 * sd + 1e-9);
    }
}

TEST_CASE("theta given a rectangle averages its start plus half the processing time") {
  Instance inst({1.0, 1.0}, {1.0}, {{6.0}, {10.0}});
  FractionalSolution sol(2, 1, {0.0, 1.0, 4.0}, {{0, 0, 1, 0.3}, {1, 0, 2, 0.7}});
  const int trials = 20000;
  double sum[2] = {0, 0}, sq[2] = {0, 0};
  int cnt[2] = {0, 0};
  for (int t = 0; t < trials; ++t) {
    auto r = independent_round(sol, inst, static_cast<std::uint64_t>(t));
    const std::size_t i = r.sigma[0];
    sum[i] += r.theta[0];
    sq[i] += r.theta[0] * r.theta[0];
    ++cnt[i];
  }
  const double expect[2] = {1.0 + 3.0, 4.0 + 5.0};
  for (int i = 0; i < 2; ++i) {
    REQUIRE(cnt[i] > 100);
    const double mean = sum[i] / cnt[i];
    const double se = std::sqrt((sq[i] / cnt[i] - mean * mean) / cnt[i]);
    CHECK(std::abs(mean - expect[i]) <= 3.0 * se);
  }
}

TEST_CASE("rts keeps an integral assignment and orders by theta") {
  std::mt19937_64 rng(4);
  auto inst = testing::random_instance(rng, 2, 8);
  std::vector<std::size_t> a(inst.tasks());
  for (std::size_t j = 0; j < a.size(); ++j) a[j] = j % inst.workers();
  auto sol = integral_of(inst, a);
  RoundedAssignment r;
  auto s = rts(sol, inst, 11, 0.3, &r);
  CHECK(s.assignment == a);
  s.validate(inst);
  for (std::size_t j = 0; j < a.size(); ++j) {
    // every task is dominated by its only worker
    CHECK(r.theta[j] == doctest::Approx(1.3 * r.start[j] + r.tau[j] + 0.2 * inst.rst(a[j], j)));
  }
  for (const auto& seq : s.order)
    for (std::size_t k = 1; k < seq.size(); ++k) CHECK(r.theta[seq[k - 1]] <= r.theta[seq[k]]);
}

TEST_CASE("rts without dominance adds no offset") {
  Instance inst({1.0, 1.0}, {1.0, 1.0}, {{2.0, 3.0}, {2.0, 3.0}});
  FractionalSolution sol(2, 2, {0.0, 1.0},
                         {{0, 0, 1, 0.5}, {1, 0, 1, 0.5}, {0, 1, 0, 0.5}, {1, 1, 0, 0.5}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RoundedAssignment r;
    rts(sol, inst, seed, 0.3, &r);
    for (std::size_t j = 0; j < 2; ++j) CHECK(r.theta[j] == doctest::Approx(1.3 * r.start[j] + r.tau[j]));
  }
}

TEST_CASE("rts breaks theta ties at random") {
  // Zero processing times and equal starts make every theta equal.
  Instance inst({1.0}, {1.0, 1.0, 1.0}, {{0.0, 0.0, 0.0}});
  FractionalSolution sol(1, 3, {0.0}, {{0, 0, 0, 1.0}, {0, 1, 0, 1.0}, {0, 2, 0, 1.0}});
  std::set<std::vector<std::size_t>> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) seen.insert(rts(sol, inst, seed).order[0]);
  CHECK(seen.size() == 6);
}

TEST_CASE("independent expectation: direct formula examples") {
  Instance one({1.5}, {2.0}, {{3.0}});
  FractionalSolution s1(1, 1, {0.0}, {{0, 0, 0, 1.0}});
  CHECK(expected_completion_independent(s1, one, 0, 0, PartialAssignment(1)) == doctest::Approx(6.0));

  Instance two({1.0}, {2.0, 1.0}, {{1.0, 1.0}});
  FractionalSolution s2(1, 2, {0.0}, {{0, 0, 0, 1.0}, {0, 1, 0, 1.0}});
  // task 0 has the larger ratio, task 1 waits for it: 2 + 1 + 1
  CHECK(expected_completion_independent(s2, two, 0, 1, PartialAssignment(2)) == doctest::Approx(4.0));
  CHECK(expected_completion_independent(s2, two, 0, 0, PartialAssignment(2)) == doctest::Approx(3.0));

  PartialAssignment p(2);
  p.assign(0, 0);
  CHECK_THROWS_AS(p.assign(0, 0), StructuralError);
  Instance two_w({1.0, 1.0}, {2.0, 1.0}, {{1.0, 1.0}, {1.0, 1.0}});
  FractionalSolution s3(2, 2, {0.0}, {{0, 0, 0, 0.5}, {1, 0, 0, 0.5}, {0, 1, 0, 0.5}, {1, 1, 0, 0.5}});
  CHECK_THROWS_AS(expected_completion_independent(s3, two_w, 1, 0, p), std::invalid_argument);
}

TEST_CASE("independent expectation matches Monte-Carlo under Smith sequencing") {
  std::mt19937_64 rng(5);
  for (int inst_no = 0; inst_no < 3; ++inst_no) {
    auto inst = testing::random_instance(rng, 3, 5);
    auto sol = random_fractional(rng, inst, 3);
    const int trials = 20000;
    const std::size_t n = inst.tasks();
    std::vector<double> sum(n, 0.0), sq(n, 0.0);
    for (int t = 0; t < trials; ++t) {
      auto r = independent_round(sol, inst, static_cast<std::uint64_t>(t) + 1000u * inst_no);
      auto c = smith_completions(inst, r.sigma);
      for (std::size_t j = 0; j < n; ++j) {
        sum[j] += c[j];
        sq[j] += c[j] * c[j];
      }
    }
    PartialAssignment none(n);
    for (std::size_t j = 0; j < n; ++j) {
      double formula = 0.0;
      for (std::size_t i = 0; i < inst.workers(); ++i)
        formula += sol.y(i, j) * expected_completion_independent(sol, inst, i, j, none);
      const double mean = sum[j] / trials;
      const double se = std::sqrt(std::max(0.0, sq[j] / trials - mean * mean) / trials);
      CHECK(std::abs(mean - formula) <= 3.0 * se + 1e-9);
    }
  }
}

TEST_CASE("full potential agrees with per-task formulas") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = testing::random_instance(rng, 3, 7);
    auto sol = random_fractional(rng, inst, 3);
    PartialAssignment p(inst.tasks());
    std::uniform_int_distribution<std::size_t> pw(0, inst.workers() - 1);
    for (std::size_t j = 0; j < inst.tasks(); j += 2) p.assign(j, pw(rng));
    double direct = 0.0;
    for (std::size_t j = 0; j < inst.tasks(); ++j) {
      if (p.assigned(j)) {
        direct += inst.weight(j) * expected_completion_independent(sol, inst, p.worker_of(j), j, p);
      } else {
        for (std::size_t i = 0; i < inst.workers(); ++i)
          direct += inst.weight(j) * sol.y(i, j) * expected_completion_independent(sol, inst, i, j, p);
      }
    }
    CHECK(expected_objective_independent(sol, inst, p) == doctest::Approx(direct).epsilon(1e-12));
  }
}

// Integral input whose off-assignment service times are prohibitive.
Instance pinned_instance(std::mt19937_64& rng, std::vector<std::size_t>& a) {
  auto base = testing::random_instance(rng, 4, 9);
  std::uniform_int_distribution<std::size_t> pw(0, base.workers() - 1);
  a.assign(base.tasks(), 0);
  for (auto& v : a) v = pw(rng);
  auto rst = base.rst_rows();
  for (std::size_t i = 0; i < base.workers(); ++i)
    for (std::size_t j = 0; j < base.tasks(); ++j)
      if (a[j] != i) rst[i][j] = 1e6;
  return Instance(base.phis(), base.weights(), rst);
}

TEST_CASE("edts never does worse than an integral input and keeps a pinned one") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = testing::random_instance(rng, 4, 9);
    std::uniform_int_distribution<std::size_t> pw(0, inst.workers() - 1);
    std::vector<std::size_t> a(inst.tasks());
    for (auto& v : a) v = pw(rng);
    // An idle worker may be cheaper than the integral choice, so EDTS can
    // move tasks; it cannot end above the integral schedule.
    auto s = edts(integral_of(inst, a), inst);
    CHECK(evaluate(inst, s).wct <= evaluate(inst, Schedule::from_assignment(inst, a)).wct * (1 + 1e-12));
    std::vector<std::size_t> pinned;
    auto hard = pinned_instance(rng, pinned);
    CHECK(edts(integral_of(hard, pinned), hard).assignment == pinned);
  }
}

TEST_CASE("edts on one worker is the Smith schedule") {
  Instance inst({2.0}, {1.0, 4.0, 2.0}, {{3.0, 1.0, 2.0}});
  FractionalSolution sol(1, 3, {0.0}, {{0, 0, 0, 1.0}, {0, 1, 0, 1.0}, {0, 2, 0, 1.0}});
  DerandomizationTrace trace;
  auto s = edts(sol, inst, &trace);
  CHECK(s.order[0] == smith_order(inst, 0));
  CHECK(trace.potential.back() == doctest::Approx(evaluate(inst, s).wct));
}

TEST_CASE("edts picks the argmin of the recomputed potential and never increases it") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 60; ++trial) {
    auto inst = testing::random_instance(rng, 4, 8);
    auto sol = random_fractional(rng, inst, 4);
    DerandomizationTrace trace;
    auto s = edts(sol, inst, &trace);
    REQUIRE(trace.potential.size() == inst.tasks() + 1);
    PartialAssignment p(inst.tasks());
    CHECK(trace.potential[0] == doctest::Approx(expected_objective_independent(sol, inst, p)).epsilon(1e-12));
    for (std::size_t j = 0; j < inst.tasks(); ++j) {
      double best = 0.0;
      for (std::size_t i = 0; i < inst.workers(); ++i) {
        auto q = p;
        q.assign(j, i);
        const double v = expected_objective_independent(sol, inst, q);
        if (i == 0 || v < best) best = v;
      }
      // Near-ties may resolve either way in floating point.
      auto chosen = p;
      chosen.assign(j, s.assignment[j]);
      CHECK(expected_objective_independent(sol, inst, chosen) <= best + 1e-9 * std::abs(best));
      p.assign(j, s.assignment[j]);
      CHECK(trace.potential[j + 1] == doctest::Approx(expected_objective_independent(sol, inst, p)).epsilon(1e-10));
      CHECK(trace.potential[j + 1] <= trace.potential[j] + 1e-9 * trace.potential[j]);
    }
    CHECK(trace.potential.back() == doctest::Approx(evaluate(inst, s).wct).epsilon(1e-9));
  }
}

TEST_CASE("edts on interval LP solutions") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = testing::random_instance(rng, 4, 12);
    auto res = solve(build_interval_indexed(inst, 3.0));
    REQUIRE(res.status == SolveStatus::Optimal);
    DerandomizationTrace trace;
    auto s = edts(res.solution, inst, &trace);
    for (std::size_t k = 1; k < trace.potential.size(); ++k)
      CHECK(trace.potential[k] <= trace.potential[k - 1] + 1e-9 * trace.potential[k - 1]);
    CHECK(trace.potential.back() == doctest::Approx(evaluate(inst, s).wct).epsilon(1e-9));
  }
}

TEST_CASE("edts with explicit overheads") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = testing::random_instance(rng, 4, 8);
    auto sol = random_fractional(rng, inst, 4);
    const auto phi2 = inst.contact_times();
    DerandomizationTrace a, b;
    CHECK(edts(sol, inst, &a).assignment == edts(sol, inst, &b, phi2).assignment);
    CHECK(a.potential == b.potential);

    // Shifted (possibly negative) loads: the terminal potential is the WCT
    // under those loads.
    std::vector<double> load(inst.workers());
    for (auto& v : load) v = std::uniform_real_distribution<double>(-20.0, 20.0)(rng);
    DerandomizationTrace c;
    auto s = edts(sol, inst, &c, load);
    CHECK(c.potential.front() ==
          doctest::Approx(expected_objective_independent(sol, inst, PartialAssignment(inst.tasks()), load)));
    CHECK(c.potential.back() == doctest::Approx(evaluate(inst, s, load).wct).epsilon(1e-9));
  }
  auto inst = testing::random_instance(rng, 4, 8);
  auto sol = random_fractional(rng, inst, 4);
  const std::vector<double> wrong(inst.workers() + 1, 1.0);
  CHECK_THROWS_AS(edts(sol, inst, nullptr, wrong), std::invalid_argument);
}

TEST_CASE("grouping: light worker gets a single group") {
  FractionalSolution sol(1, 3, {0.0, 1.0}, {{0, 0, 0, 0.3}, {0, 1, 1, 0.4}, {0, 2, 0, 0.2}});
  auto g = build_grouping(sol, 0);
  REQUIRE(g.groups() == 1);
  CHECK(g.total(0) == doctest::Approx(0.3));
  CHECK(g.total(1) == doctest::Approx(0.4));
}

TEST_CASE("grouping: mass 1.5 splits as 1.0 + 0.5") {
  FractionalSolution sol(1, 3, {0.0, 1.0, 4.0}, {{0, 0, 0, 0.5}, {0, 1, 1, 0.7}, {0, 2, 2, 0.3}});
  auto g = build_grouping(sol, 0);
  REQUIRE(g.groups() == 2);
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    m0 += g.mass[0][j];
    m1 += g.mass[1][j];
  }
  CHECK(m0 == doctest::Approx(1.0));
  CHECK(m1 == doctest::Approx(0.5));
  // task 1 straddles the boundary
  CHECK(g.mass[0][1] == doctest::Approx(0.5));
  CHECK(g.mass[1][1] == doctest::Approx(0.2));
}

TEST_CASE("grouping conserves per-task mass and caps each group") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    auto inst = testing::random_instance(rng, 3, 12);
    auto sol = random_fractional(rng, inst, 5);
    for (std::size_t i = 0; i < inst.workers(); ++i) {
      auto g = build_grouping(sol, i);
      for (const auto& row : g.mass) {
        double s = 0.0;
        for (double v : row) s += v;
        CHECK(s <= 1.0 + 1e-9);
      }
      for (std::size_t j = 0; j < inst.tasks(); ++j) CHECK(g.total(j) == doctest::Approx(sol.y(i, j)).epsilon(1e-9));
    }
  }
}

TEST_CASE("grouped formulas collapse to the independent ones at eta = 0") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = testing::random_instance(rng, 3, 7);
    auto sol = random_fractional(rng, inst, 4);
    auto groups = build_groupings(sol);
    PartialAssignment p(inst.tasks());
    for (std::size_t j = 1; j < inst.tasks(); j += 3) p.assign(j, j % inst.workers());
    CHECK(grouped_expected_objective(inst, groups, p, 0.0) ==
          doctest::Approx(expected_objective_independent(sol, inst, p)).epsilon(1e-10));
    for (std::size_t j = 0; j < inst.tasks(); ++j) {
      if (p.assigned(j)) continue;
      for (std::size_t i = 0; i < inst.workers(); ++i)
        for (std::size_t u = 0; u < groups[i].groups(); ++u)
          CHECK(expected_completion_grouped(inst, groups, i, u, j, p, 0.0) ==
                doctest::Approx(expected_completion_independent(sol, inst, i, j, p)).epsilon(1e-12));
    }
  }
}

TEST_CASE("grouped formula: single task") {
  Instance inst({2.0}, {1.0}, {{3.0}});
  FractionalSolution sol(1, 1, {0.0}, {{0, 0, 0, 1.0}});
  auto groups = build_groupings(sol);
  CHECK(expected_completion_grouped(inst, groups, 0, 0, 0, PartialAssignment(1)) == doctest::Approx(7.0));
}

TEST_CASE("grouped formula: same-group discount") {
  // Worker 0 holds 0.4 of each task in one group; neither task is dominated.
  Instance inst({1.0, 1.0}, {4.0, 1.0}, {{2.0, 3.0}, {2.0, 3.0}});
  FractionalSolution sol(2, 2, {0.0},
                         {{0, 0, 0, 0.4}, {1, 0, 0, 0.6}, {0, 1, 0, 0.4}, {1, 1, 0, 0.6}});
  auto groups = build_groupings(sol);
  REQUIRE(groups[0].groups() == 1);
  const double v = expected_completion_grouped(inst, groups, 0, 0, 1, PartialAssignment(2));
  CHECK(v == doctest::Approx(2.0 + 3.0 + (1.0 - 0.1561) * 0.4 * 2.0));
  // Worker 1 dominates both: no discount there.
  const double w = expected_completion_grouped(inst, groups, 1, 0, 1, PartialAssignment(2));
  CHECK(w == doctest::Approx(2.0 + 3.0 + 0.6 * 2.0));
}

TEST_CASE("dts with eta = 0 matches edts") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = testing::random_instance(rng, 4, 9);
    auto sol = random_fractional(rng, inst, 4);
    auto a = edts(sol, inst);
    auto b = dts(inst, build_groupings(sol), 0.0);
    CHECK(a.assignment == b.assignment);
  }
}

TEST_CASE("dts never does worse than an integral input and keeps a pinned one") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = testing::random_instance(rng, 3, 8);
    std::vector<std::size_t> a(inst.tasks());
    for (std::size_t j = 0; j < a.size(); ++j) a[j] = (j * 7) % inst.workers();
    auto s = dts(inst, build_groupings(integral_of(inst, a)));
    CHECK(evaluate(inst, s).wct <= evaluate(inst, Schedule::from_assignment(inst, a)).wct * (1 + 1e-12));
    std::vector<std::size_t> pinned;
    auto hard = pinned_instance(rng, pinned);
    CHECK(dts(hard, build_groupings(integral_of(hard, pinned))).assignment == pinned);
  }
}

TEST_CASE("dts picks the argmin of the recomputed grouped potential") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    auto inst = testing::random_instance(rng, 3, 7);
    auto sol = random_fractional(rng, inst, 3);
    auto groups = build_groupings(sol);
    DerandomizationTrace trace;
    auto s = dts(inst, groups, kDefaultEta, &trace);
    PartialAssignment p(inst.tasks());
    for (std::size_t j = 0; j < inst.tasks(); ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < inst.workers(); ++i) {
        auto q = p;
        q.assign(j, i);
        best = std::min(best, grouped_expected_objective(inst, groups, q));
      }
      p.assign(j, s.assignment[j]);
      CHECK(grouped_expected_objective(inst, groups, p) <= best + 1e-9 * std::abs(best));
    }
    // Once every task is committed no discount remains.
    CHECK(trace.potential.back() == doctest::Approx(evaluate(inst, s).wct).epsilon(1e-9));
  }
}

TEST_CASE("dts potential replay") {
  // The (1 - eta) factor disappears from a pair once either task is
  // committed, so a step can raise the grouped potential. Count how often.
  std::mt19937_64 rng(15);
  int steps = 0, rises = 0, above_start = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto inst = testing::random_instance(rng, 3, 7);
    auto sol = random_fractional(rng, inst, 3);
    DerandomizationTrace trace;
    auto s = dts(inst, build_groupings(sol), kDefaultEta, &trace);
    for (std::size_t k = 1; k < trace.potential.size(); ++k, ++steps)
      if (trace.potential[k] > trace.potential[k - 1] * (1.0 + 1e-12) + 1e-9) ++rises;
    if (evaluate(inst, s).wct > trace.potential.front() + 1e-9) ++above_start;
  }
  MESSAGE("grouped potential rose on " << rises << " of " << steps << " steps; final WCT above "
                                       << "the initial grouped expectation on " << above_start << " of 60 runs");
  CHECK(steps > 0);
}
