#include <doctest.h>

#include <cmath>
#include <random>

#include "accesskit/error.hpp"
#include "accesskit/fca.hpp"
#include "accesskit/optimize.hpp"
#include "test_support.hpp"

using namespace accesskit;

namespace {

AllocationProblem make_problem(testing::Instance inst, DecaySpec decay, std::vector<std::size_t> candidates,
                               std::size_t budget, Objective objective, double unit = 10.0) {
  AllocationProblem p{std::move(inst.dataset), std::move(inst.matrix), decay};
  p.candidates = std::move(candidates);
  p.budget = budget;
  p.objective = objective;
  p.unit_size = unit;
  return p;
}

// Two demand sites, each reached by its own existing supply; supply 2 is a
// zero-capacity site that only reaches demand 0.
testing::Instance split_instance() {
  testing::Instance inst;
  inst.dataset.kind = CoordinateKind::Planar;
  inst.dataset.demand = {{"a", {0, 0}, 100}, {"b", {0, 0}, 100}};
  inst.dataset.supply = {{"s0", {0, 0}, 10}, {"s1", {0, 0}, 10}, {"new", {0, 0}, 0}};
  const double inf = std::numeric_limits<double>::infinity();
  inst.matrix = TravelMatrix(2, 3, CostUnit::Minutes);
  inst.matrix(0, 0) = 1;
  inst.matrix(0, 1) = inf;
  inst.matrix(0, 2) = 1;
  inst.matrix(1, 0) = inf;
  inst.matrix(1, 1) = 1;
  inst.matrix(1, 2) = inf;
  return inst;
}

testing::Instance single_pair(double population, double capacity) {
  testing::Instance inst;
  inst.dataset.kind = CoordinateKind::Planar;
  inst.dataset.demand = {{"d", {0, 0}, population}};
  inst.dataset.supply = {{"s", {0, 0}, capacity}};
  inst.matrix = TravelMatrix(1, 1, CostUnit::Minutes, 5.0);
  return inst;
}

}  // namespace

TEST_CASE("evaluator baseline matches plain accessibility") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    auto inst = testing::random_instance(rng, 20, 6, 30, true);
    const auto decay = testing::random_decay(rng, 30);
    const auto direct = g2sfca(inst.dataset, inst.matrix, decay).scores;
    const auto p = make_problem(inst, decay, {4, 1}, 3, Objective::MaxMinAccess);
    const ObjectiveEvaluator eval(p);
    CHECK(eval.candidates() == std::vector<std::size_t>{1, 4});
    const auto s = eval.scores(std::vector<std::size_t>{0, 0});
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i] == direct[i]);
    CHECK(eval.baseline() == *std::min_element(direct.begin(), direct.end()));

    // Adding capacity never lowers any score.
    const auto more = eval.scores(std::vector<std::size_t>{2, 1});
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(more[i] >= s[i]);
  }
}

TEST_CASE("single pair allocation") {
  auto p = make_problem(single_pair(100, 10), DecaySpec::binary(30), {0}, 1, Objective::MaxMinAccess);
  const auto plan = greedy_allocate(p);
  CHECK(plan.objective_before == doctest::Approx(0.1));
  CHECK(plan.objective_after == doctest::Approx(0.2));
  CHECK(plan.units == std::vector<std::size_t>{1});
  CHECK(plan.trace.size() == 2);
}

TEST_CASE("greedy ties go to the smaller supply index") {
  // Two identical empty candidates serving the only demand site.
  testing::Instance inst;
  inst.dataset.kind = CoordinateKind::Planar;
  inst.dataset.demand = {{"d", {0, 0}, 50}};
  for (int j = 0; j < 6; ++j) inst.dataset.supply.push_back({"s" + std::to_string(j), {0, 0}, j < 2 ? 5.0 : 0.0});
  inst.matrix = TravelMatrix(1, 6, CostUnit::Minutes, 1.0);
  const auto p = make_problem(inst, DecaySpec::binary(10), {5, 2}, 1, Objective::MaxMinAccess);
  const auto plan = greedy_allocate(p);
  CHECK(plan.candidates == std::vector<std::size_t>{2, 5});
  CHECK(plan.units == std::vector<std::size_t>{1, 0});
}

TEST_CASE("allocation counts and brute force enumeration") {
  CHECK(allocation_count(2, 2) == 3);
  CHECK(allocation_count(0, 4) == 1);
  CHECK(allocation_count(3, 3) == 10);
  CHECK(allocation_count(10, 5) == 1001);
  CHECK(allocation_count(1000, 1000) == std::numeric_limits<std::size_t>::max());

  const auto zero = make_problem(split_instance(), DecaySpec::binary(10), {2, 0}, 0, Objective::MaxMinAccess);
  const auto plan0 = brute_force_allocate(zero);
  CHECK(plan0.total_units() == 0);
  CHECK(plan0.objective_after == plan0.objective_before);

  const auto big = make_problem(split_instance(), DecaySpec::binary(10), {0, 1, 2}, 1000,
                                Objective::MaxMinAccess);
  CHECK_THROWS_WITH_AS(brute_force_allocate(big), doctest::Contains("InstanceTooLarge"), Error);
}

TEST_CASE("brute force finds the balancing allocation") {
  // Demand a is served by s0 and new, b by s1 only. Both start at 0.1, so
  // the minimum only rises when both get a unit.
  const auto p = make_problem(split_instance(), DecaySpec::binary(10), {1, 2}, 2, Objective::MaxMinAccess);
  const auto plan = brute_force_allocate(p);
  CHECK(plan.units == std::vector<std::size_t>{1, 1});
  CHECK(plan.objective_after == doctest::Approx(0.2));
  const auto greedy = greedy_allocate(p);
  CHECK(greedy.units == plan.units);
}

TEST_CASE("problem validation") {
  auto p = make_problem(split_instance(), DecaySpec::binary(10), {}, 1, Objective::MaxMinAccess);
  CHECK_THROWS_WITH_AS(greedy_allocate(p), doctest::Contains("NoCandidates"), Error);
  p.candidates = {1, 1};
  CHECK_THROWS_WITH_AS(greedy_allocate(p), doctest::Contains("DuplicateCandidate"), Error);
  p.candidates = {7};
  CHECK_THROWS_WITH_AS(greedy_allocate(p), doctest::Contains("UnknownCandidate"), Error);
  p.candidates = {1};
  p.unit_size = 0;
  CHECK_THROWS_WITH_AS(greedy_allocate(p), doctest::Contains("InvalidUnitSize"), Error);
  p.unit_size = 1;
  const ObjectiveEvaluator eval(p);
  CHECK_THROWS_WITH_AS(eval.evaluate(std::vector<std::size_t>{2}), doctest::Contains("AllocationExceedsBudget"),
                       Error);
  CHECK_THROWS_WITH_AS(eval.evaluate(std::vector<std::size_t>{0, 0}), doctest::Contains("AllocationMismatch"),
                       Error);
  CHECK_THROWS_AS(objective_from_string("max_happiness"), Error);
  CHECK(objective_from_string("min_variance") == Objective::MinVariance);
}

TEST_CASE("adding capacity can worsen gini and variance") {
  // Demand a and b start equal; the only candidate serves a alone, so any
  // nonempty allocation opens a gap.
  for (auto objective : {Objective::MinWeightedGini, Objective::MinVariance}) {
    const auto p = make_problem(split_instance(), DecaySpec::binary(10), {2}, 1, objective);
    const auto plan = greedy_allocate(p);
    CHECK(plan.objective_before == doctest::Approx(0.0));
    CHECK(plan.objective_after > plan.objective_before);
    CHECK(plan.total_units() == 1);
  }
}

TEST_CASE("local search") {
  const auto p = make_problem(split_instance(), DecaySpec::binary(10), {1, 2}, 2, Objective::MaxMinAccess);
  const auto optimum = brute_force_allocate(p);

  // Starting from the worst allocation, transfers reach the optimum.
  auto bad = optimum;
  bad.units = {0, 2};
  bad.trace.clear();
  const auto improved = local_search_improve(p, bad, 100);
  CHECK(improved.units == optimum.units);
  CHECK(improved.objective_after == doctest::Approx(optimum.objective_after));
  for (std::size_t k = 1; k < improved.trace.size(); ++k) CHECK(improved.trace[k] > improved.trace[k - 1]);

  const auto untouched = local_search_improve(p, bad, 0);
  CHECK(untouched.units == bad.units);

  // The optimum is a fixed point.
  const auto fixed = local_search_improve(p, optimum, 100);
  CHECK(fixed.units == optimum.units);
  CHECK(fixed.trace.size() == optimum.trace.size());

  auto wrong = optimum;
  wrong.candidates = {0, 1};
  CHECK_THROWS_WITH_AS(local_search_improve(p, wrong, 10), doctest::Contains("PlanMismatch"), Error);
}

TEST_CASE("random instances: feasibility, determinism and optimality bounds") {
  std::mt19937_64 rng(2024);
  int matches = 0;
  int runs = 0;
  for (int t = 0; t < 60; ++t) {
    auto inst = testing::random_instance(rng, testing::uniform_index(rng, 2, 8),
                                         testing::uniform_index(rng, 2, 5), 30, true, 0.0);
    const auto decay = testing::random_decay(rng, 30);
    const std::size_t ns = inst.dataset.supply.size();
    std::vector<std::size_t> candidates;
    for (std::size_t j = 0; j < ns; ++j) {
      if (testing::uniform(rng, 0, 1) < 0.6) candidates.push_back(j);
    }
    if (candidates.empty()) candidates.push_back(0);
    const auto objective = static_cast<Objective>(testing::uniform_index(rng, 0, 2));
    auto p = make_problem(inst, decay, candidates, testing::uniform_index(rng, 0, 4), objective,
                          testing::uniform(rng, 1, 100));

    const auto greedy = greedy_allocate(p);
    const auto brute = brute_force_allocate(p);
    CHECK(greedy.total_units() == p.budget);
    CHECK(brute.total_units() == p.budget);
    CHECK(greedy.trace.size() == p.budget + 1);
    CHECK(!improves(objective, greedy.objective_after, brute.objective_after));
    ++runs;
    if (greedy.objective_after == brute.objective_after) ++matches;

    const auto local = local_search_improve(p, greedy, 1000);
    CHECK(local.total_units() == p.budget);
    CHECK(!improves(objective, greedy.objective_after, local.objective_after));
    CHECK(!improves(objective, local.objective_after, brute.objective_after));

    p.threads = 4;
    const auto threaded = greedy_allocate(p);
    CHECK(threaded.units == greedy.units);
    CHECK(threaded.trace == greedy.trace);

    if (objective == Objective::MaxMinAccess) {
      for (std::size_t k = 1; k < greedy.trace.size(); ++k) CHECK(greedy.trace[k] >= greedy.trace[k - 1]);
    }
  }
  MESSAGE("greedy matched brute force on " << matches << " of " << runs << " instances");
}
