#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "accesskit/data_model.hpp"
#include "accesskit/decay.hpp"
#include "accesskit/fca.hpp"
#include "accesskit/travel.hpp"

namespace accesskit {

enum class Objective { MaxMinAccess, MinWeightedGini, MinVariance };

std::string_view to_string(Objective objective);
Objective objective_from_string(std::string_view text);

// True when objective value `a` is strictly better than `b`.
bool improves(Objective objective, double a, double b);

// Distribute `budget` whole units of `unit_size` capacity over candidate
// supply sites. Candidates may be zero-capacity new sites.
struct AllocationProblem {
  Dataset dataset;
  TravelMatrix matrix;
  DecaySpec decay;
  FcaMethod method = FcaMethod::G2sfca;
  std::size_t budget = 0;
  double unit_size = 1.0;
  std::vector<std::size_t> candidates;  // supply indices
  Objective objective = Objective::MaxMinAccess;
  unsigned threads = 1;
};

struct ReallocationPlan {
  Objective objective = Objective::MaxMinAccess;
  // Supply indices in ascending order and the units each receives.
  std::vector<std::size_t> candidates;
  std::vector<std::size_t> units;
  double objective_before = 0.0;
  double objective_after = 0.0;
  // Objective after every accepted step, starting with objective_before.
  std::vector<double> trace;

  std::size_t total_units() const;
};

// Scores accessibility with capacities raised by an allocation. The decay
// weights and captured demand are computed once at construction.
class ObjectiveEvaluator {
 public:
  explicit ObjectiveEvaluator(const AllocationProblem& problem);

  // Candidates sorted ascending; allocations are indexed in this order.
  const std::vector<std::size_t>& candidates() const noexcept { return candidates_; }
  double baseline() const { return evaluate(std::vector<std::size_t>(candidates_.size(), 0)); }
  double evaluate(std::span<const std::size_t> allocation) const;
  std::vector<double> scores(std::span<const std::size_t> allocation) const;

 private:
  const AllocationProblem& problem_;
  Catchment catchment_;
  std::vector<std::size_t> candidates_;
  std::vector<double> base_capacity_;
};

// Objective value for an allocation (indexed like the ascending candidate
// list). An allocation may use less than the whole budget.
double evaluate_objective(const AllocationProblem& problem, std::span<const std::size_t> allocation);

// Objective value of a score vector under the problem's population weights.
double objective_value(Objective objective, std::span<const double> scores,
                       std::span<const DemandSite> demand);

// One unit at a time to the candidate whose addition gives the best
// objective; ties go to the smaller supply index.
ReallocationPlan greedy_allocate(const AllocationProblem& problem);

// Best single-unit transfer between candidates while it strictly improves
// the objective, up to max_iters moves.
ReallocationPlan local_search_improve(const AllocationProblem& problem, ReallocationPlan plan,
                                      std::size_t max_iters);

inline constexpr std::size_t kBruteForceLimit = 100000;

// Exhaustive search over all C(budget + m - 1, budget) allocations. Ties are
// resolved in favor of the first allocation in enumeration order, which is
// lexicographically descending (budget, 0, ...) first.
ReallocationPlan brute_force_allocate(const AllocationProblem& problem);

// Number of allocations of `budget` units over `m` candidates, saturating
// at max(size_t).
std::size_t allocation_count(std::size_t budget, std::size_t m);

}  // namespace accesskit
