#pragma once

// Mirror agent model: the robot's deterministic belief/plan next to the
// observer-side ensemble of weighted (plan, belief) hypotheses, with the
// cross-entropy, posterior filtering and information-gain machinery that
// scores verbalizations of the robot plan.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "plancomm/extended_real.hpp"
#include "plancomm/ground.hpp"
#include "plancomm/pddl.hpp"
#include "plancomm/planner.hpp"

namespace plancomm {

// Bernoulli parameters over uncertain initial atoms times a categorical
// distribution over candidate goals.
struct BeliefPrior {
  std::vector<pddl::GroundAtom> base_init;
  std::vector<pddl::GroundAtom> uncertain_atoms;
  std::vector<double> theta;  // P(atom_j in init), one per uncertain atom
  std::vector<std::vector<pddl::GroundAtom>> goal_pool;
  std::vector<double> goal_theta;  // sums to 1

  void validate() const;
  // Uniform over goals, `p` for every uncertain atom.
  static BeliefPrior uniform(std::vector<pddl::GroundAtom> base_init,
                             std::vector<pddl::GroundAtom> uncertain_atoms, double p,
                             std::vector<std::vector<pddl::GroundAtom>> goal_pool);
};

struct Belief {
  AtomSet init;
  AtomSet goal;
  std::size_t goal_index = 0;
  std::uint32_t init_choices = 0;  // bit j set: uncertain atom j holds

  bool operator==(const Belief&) const = default;
};

struct Hypothesis {
  Belief belief;
  double prior = 0.0;
  WeightedPlanSet plans;
};

// Ordered subset of the robot's ground actions. `positions` holds the plan
// index each action was taken from (parallel to `actions`).
struct Verbalization {
  std::vector<ActionId> actions;
  std::vector<std::size_t> positions;

  std::size_t size() const { return actions.size(); }
  bool empty() const { return actions.empty(); }
  static Verbalization of(std::vector<ActionId> actions);
};

class MirrorModel {
 public:
  // Validates the invariants: priors positive and summing to one, a
  // hypothesis for `robot_belief` whose plan set contains `robot_plan`.
  // Priors are renormalized.
  static MirrorModel from_hypotheses(std::shared_ptr<const GroundModel> model,
                                     Belief robot_belief, Plan robot_plan,
                                     std::vector<Hypothesis> hypotheses,
                                     std::size_t goal_count);

  const GroundModel& ground() const { return *model_; }
  std::shared_ptr<const GroundModel> ground_ptr() const { return model_; }
  const Belief& robot_belief() const { return robot_belief_; }
  const Plan& robot_plan() const { return robot_plan_; }
  const std::vector<Hypothesis>& hypotheses() const { return hypotheses_; }
  std::size_t robot_hypothesis() const { return robot_hyp_; }
  std::size_t robot_plan_index() const { return robot_plan_idx_; }
  std::size_t goal_count() const { return goal_count_; }

  // Joint prior mass P(plan_R, belief_R).
  double robot_joint() const;

  // Distinct robot actions in order of first occurrence, with that position.
  const std::vector<ActionId>& distinct_actions() const { return distinct_; }
  const std::vector<std::size_t>& first_positions() const { return first_pos_; }
  bool in_robot_plan(ActionId a) const;

  // Prior mass of (plan, belief) pairs whose plan contains every robot
  // action selected in `subset` (indices into distinct_actions()).
  double surviving_mass(const std::vector<std::size_t>& subset) const;

 private:
  friend class SubsetScorer;

  std::shared_ptr<const GroundModel> model_;
  Belief robot_belief_;
  Plan robot_plan_;
  std::vector<Hypothesis> hypotheses_;
  std::size_t robot_hyp_ = 0;
  std::size_t robot_plan_idx_ = 0;
  std::size_t goal_count_ = 0;

  std::vector<ActionId> distinct_;
  std::vector<std::size_t> first_pos_;
  // Joint pairs grouped by which robot actions their plan contains.
  std::size_t mask_words_ = 0;
  std::vector<std::uint64_t> group_masks_;  // mask_words_ per group
  std::vector<double> group_mass_;
};

struct BuildOptions {
  std::size_t k = 1;
  double tau = 1.0;
  SearchOptions search{};
  GroundOptions grounding{};
  std::size_t max_uncertain_atoms = 16;
};

// Enumerates every initial-state variant x candidate goal, plans each with
// plan_topk, prunes unsolvable beliefs and renormalizes. The robot plan is
// plan_optimal on the robot belief. The template's own init is replaced by
// prior.base_init; only its objects and name are used.
MirrorModel build_model(const pddl::Domain& domain, const pddl::Problem& problem_template,
                        const BeliefPrior& prior, std::size_t robot_goal_index,
                        const std::vector<bool>& robot_init_choices,
                        const BuildOptions& options = {});

struct JointEntry {
  std::size_t hypothesis;
  std::size_t plan;
  double weight;
};

class Posterior {
 public:
  Posterior() = default;
  Posterior(std::vector<JointEntry> entries, double surviving_mass);

  // No (plan, belief) pair explains the verbalization.
  bool all_eliminated() const { return entries_.empty(); }
  const std::vector<JointEntry>& entries() const { return entries_; }
  // Unnormalized prior mass that survived the filtering.
  double surviving_mass() const { return mass_; }
  double weight(std::size_t hypothesis, std::size_t plan) const;
  std::vector<double> goal_marginals(const MirrorModel& model) const;

 private:
  std::vector<JointEntry> entries_;
  double mass_ = 0.0;
};

// Joint prior over (plan, belief), i.e. the posterior for the empty verbalization.
Posterior prior_joint(const MirrorModel& model);

// weight(plan, belief | o) ∝ prior(belief) w(plan | belief) [o ⊆ plan].
Posterior posterior(const MirrorModel& model, const Verbalization& o);

// -ln P(plan_R | belief_R) - ln P(belief_R), in nats.
ExtendedReal cross_entropy(const MirrorModel& model);
ExtendedReal conditional_cross_entropy(const MirrorModel& model, const Verbalization& o);
// cross_entropy - conditional_cross_entropy; -inf if o leaves the robot plan.
ExtendedReal information_gain(const MirrorModel& model, const Verbalization& o);

// Exhaustive search over all size-N subsets of the robot's distinct actions.
// Ties go to the lexicographically smallest plan-position vector. Output is
// in plan order.
Verbalization find_most_informative(const MirrorModel& model, std::size_t n,
                                    std::size_t max_subsets = 200'000'000);

// Greedy chain: each step adds the single action with the best gain.
Verbalization find_most_informative_nested(const MirrorModel& model, std::size_t n);

}  // namespace plancomm
