#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "plancomm/ground.hpp"

namespace plancomm {

struct Plan {
  std::vector<ActionId> actions;

  std::size_t cost() const { return actions.size(); }  // unit costs
  auto operator<=>(const Plan&) const = default;
};

// Up to k distinct plans for one belief, weighted by rationality:
// w(plan) is proportional to exp(tau * (optimal_cost - cost(plan))).
struct WeightedPlanSet {
  std::vector<Plan> plans;     // sorted by (cost, action order)
  std::vector<double> weights; // sums to 1
  std::size_t optimal_cost = 0;
};

struct SearchOptions {
  std::size_t max_expansions = 10'000'000;
};

bool is_applicable(const GroundAction& action, const AtomSet& state);
AtomSet apply_action(const GroundAction& action, const AtomSet& state);

// Unit-cost h_max of `state` w.r.t. the instance goal; nullopt for relaxed dead ends.
std::optional<std::size_t> hmax(const GroundInstance& instance, const AtomSet& state);

// Cost-optimal plan (A* with h_max). nullopt when the goal is unreachable.
// Throws ResourceError past the expansion cap.
std::optional<Plan> plan_optimal(const GroundInstance& instance,
                                 const SearchOptions& options = {});

// k cheapest distinct plans by iterative plan forbidding. nullopt when the
// instance is unsolvable.
std::optional<WeightedPlanSet> plan_topk(const GroundInstance& instance, std::size_t k,
                                         double tau, const SearchOptions& options = {});

bool validate_plan(const GroundInstance& instance, const Plan& plan);

// One "(name arg1 arg2)" line per action.
std::string format_plan(const GroundModel& model, const Plan& plan);

}  // namespace plancomm
