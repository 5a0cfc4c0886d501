#include "accesskit/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "accesskit/equity.hpp"
#include "accesskit/error.hpp"
#include "accesskit/parallel.hpp"

namespace accesskit {

namespace {

std::vector<std::size_t> normalized_candidates(const AllocationProblem& problem) {
  if (problem.candidates.empty()) {
    throw Error("optimize", "NoCandidates", "candidate list is empty");
  }
  std::vector<std::size_t> sorted = problem.candidates;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error("optimize", "DuplicateCandidate", "a supply site is listed twice as candidate");
  }
  if (sorted.back() >= problem.dataset.supply.size()) {
    throw Error("optimize", "UnknownCandidate",
                "candidate index " + std::to_string(sorted.back()) + " out of range");
  }
  if (!(std::isfinite(problem.unit_size) && problem.unit_size > 0.0)) {
    throw Error("optimize", "InvalidUnitSize", "unit_size must be a positive finite value");
  }
  return sorted;
}

ReallocationPlan empty_plan(const AllocationProblem& problem, const ObjectiveEvaluator& eval) {
  ReallocationPlan plan;
  plan.objective = problem.objective;
  plan.candidates = eval.candidates();
  plan.units.assign(plan.candidates.size(), 0);
  plan.objective_before = eval.baseline();
  plan.objective_after = plan.objective_before;
  plan.trace = {plan.objective_before};
  return plan;
}

// Index of the first strictly best value; values are already in tie-break
// order.
std::size_t first_best(Objective objective, const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (improves(objective, values[k], values[best])) best = k;
  }
  return best;
}

}  // namespace

std::string_view to_string(Objective objective) {
  switch (objective) {
    case Objective::MaxMinAccess: return "max_min_access";
    case Objective::MinWeightedGini: return "min_weighted_gini";
    case Objective::MinVariance: return "min_variance";
  }
  return "unknown";
}

Objective objective_from_string(std::string_view text) {
  for (auto o : {Objective::MaxMinAccess, Objective::MinWeightedGini, Objective::MinVariance}) {
    if (to_string(o) == text) return o;
  }
  throw Error("optimize", "UnknownObjective", "unknown objective '" + std::string(text) + "'");
}

bool improves(Objective objective, double a, double b) {
  return objective == Objective::MaxMinAccess ? a > b : a < b;
}

std::size_t ReallocationPlan::total_units() const {
  return std::accumulate(units.begin(), units.end(), std::size_t{0});
}

double objective_value(Objective objective, std::span<const double> scores,
                       std::span<const DemandSite> demand) {
  if (objective == Objective::MaxMinAccess) {
    return *std::min_element(scores.begin(), scores.end());
  }
  // Population-weighted statistics over inhabited sites.
  std::vector<double> values;
  std::vector<double> weights;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (demand[i].population > 0.0) {
      values.push_back(scores[i]);
      weights.push_back(demand[i].population);
    }
  }
  if (weights.empty()) {
    throw Error("optimize", "ZeroTotalPopulation", "no inhabited demand sites");
  }
  if (objective == Objective::MinWeightedGini) return gini(values, weights);

  double total_w = 0.0;
  double mean = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    total_w += weights[i];
    mean += weights[i] * values[i];
  }
  mean /= total_w;
  double var = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    var += weights[i] * (values[i] - mean) * (values[i] - mean);
  }
  return var / total_w;
}

ObjectiveEvaluator::ObjectiveEvaluator(const AllocationProblem& problem)
    : problem_(problem),
      catchment_(problem.dataset, problem.matrix, effective_decay(problem.method, problem.decay),
                 problem.threads),
      candidates_(normalized_candidates(problem)),
      base_capacity_(capacities(problem.dataset)) {
  problem.dataset.require_sites();
}

std::vector<double> ObjectiveEvaluator::scores(std::span<const std::size_t> allocation) const {
  if (allocation.size() != candidates_.size()) {
    throw Error("optimize", "AllocationMismatch",
                "allocation has " + std::to_string(allocation.size()) + " entries for " +
                    std::to_string(candidates_.size()) + " candidates");
  }
  if (std::accumulate(allocation.begin(), allocation.end(), std::size_t{0}) > problem_.budget) {
    throw Error("optimize", "AllocationExceedsBudget", "allocation uses more than the budget");
  }
  std::vector<double> capacity = base_capacity_;
  for (std::size_t c = 0; c < candidates_.size(); ++c) {
    capacity[candidates_[c]] += static_cast<double>(allocation[c]) * problem_.unit_size;
  }
  return catchment_.scores(problem_.method, capacity);
}

double ObjectiveEvaluator::evaluate(std::span<const std::size_t> allocation) const {
  const auto s = scores(allocation);
  return objective_value(problem_.objective, s, problem_.dataset.demand);
}

double evaluate_objective(const AllocationProblem& problem,
                          std::span<const std::size_t> allocation) {
  return ObjectiveEvaluator(problem).evaluate(allocation);
}

ReallocationPlan greedy_allocate(const AllocationProblem& problem) {
  const ObjectiveEvaluator eval(problem);
  ReallocationPlan plan = empty_plan(problem, eval);
  const std::size_t m = plan.candidates.size();
  std::vector<double> trial(m);
  for (std::size_t step = 0; step < problem.budget; ++step) {
    // Evaluate every single-unit addition, then pick sequentially so the
    // choice does not depend on the schedule.
    parallel_for(m, problem.threads, [&](std::size_t c) {
      std::vector<std::size_t> alloc = plan.units;
      ++alloc[c];
      trial[c] = eval.evaluate(alloc);
    });
    const std::size_t best = first_best(problem.objective, trial);
    ++plan.units[best];
    plan.objective_after = trial[best];
    plan.trace.push_back(trial[best]);
  }
  return plan;
}

ReallocationPlan local_search_improve(const AllocationProblem& problem, ReallocationPlan plan,
                                      std::size_t max_iters) {
  const ObjectiveEvaluator eval(problem);
  if (plan.candidates != eval.candidates() || plan.units.size() != plan.candidates.size()) {
    throw Error("optimize", "PlanMismatch", "plan candidates do not match the problem");
  }
  const std::size_t m = plan.candidates.size();
  double current = eval.evaluate(plan.units);
  plan.objective_after = current;
  if (plan.trace.empty()) plan.trace.push_back(current);

  struct Move {
    std::size_t from;
    std::size_t to;
  };
  std::vector<Move> moves;
  std::vector<double> values;
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    moves.clear();
    for (std::size_t from = 0; from < m; ++from) {
      if (plan.units[from] == 0) continue;
      for (std::size_t to = 0; to < m; ++to) {
        if (to != from) moves.push_back({from, to});
      }
    }
    if (moves.empty()) break;
    values.assign(moves.size(), 0.0);
    parallel_for(moves.size(), problem.threads, [&](std::size_t k) {
      std::vector<std::size_t> alloc = plan.units;
      --alloc[moves[k].from];
      ++alloc[moves[k].to];
      values[k] = eval.evaluate(alloc);
    });
    const std::size_t best = first_best(problem.objective, values);
    if (!improves(problem.objective, values[best], current)) break;
    --plan.units[moves[best].from];
    ++plan.units[moves[best].to];
    current = values[best];
    plan.objective_after = current;
    plan.trace.push_back(current);
  }
  return plan;
}

std::size_t allocation_count(std::size_t budget, std::size_t m) {
  if (m == 0) return budget == 0 ? 1 : 0;
  // C(budget + m - 1, m - 1), computed incrementally; each partial product
  // is itself a binomial coefficient so the division is exact.
  const std::size_t k = m - 1;
  std::size_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::size_t numerator = budget + i;
    if (result > std::numeric_limits<std::size_t>::max() / numerator) {
      return std::numeric_limits<std::size_t>::max();
    }
    result = result * numerator / i;
  }
  return result;
}

ReallocationPlan brute_force_allocate(const AllocationProblem& problem) {
  const ObjectiveEvaluator eval(problem);
  ReallocationPlan plan = empty_plan(problem, eval);
  const std::size_t m = plan.candidates.size();
  const std::size_t count = allocation_count(problem.budget, m);
  if (count > kBruteForceLimit) {
    throw Error("optimize", "InstanceTooLarge",
                std::to_string(count) + " allocations exceed the limit of " +
                    std::to_string(kBruteForceLimit));
  }

  std::vector<std::size_t> alloc(m, 0);
  std::vector<std::size_t> best_alloc;
  double best_value = 0.0;
  // Compositions in lexicographically descending order.
  auto visit = [&](auto&& self, std::size_t pos, std::size_t remaining) -> void {
    if (pos + 1 == m) {
      alloc[pos] = remaining;
      const double v = eval.evaluate(alloc);
      if (best_alloc.empty() || improves(problem.objective, v, best_value)) {
        best_alloc = alloc;
        best_value = v;
      }
      return;
    }
    for (std::size_t u = remaining + 1; u-- > 0;) {
      alloc[pos] = u;
      self(self, pos + 1, remaining - u);
    }
  };
  visit(visit, 0, problem.budget);

  plan.units = best_alloc;
  plan.objective_after = best_value;
  plan.trace.push_back(best_value);
  return plan;
}

}  // namespace accesskit
