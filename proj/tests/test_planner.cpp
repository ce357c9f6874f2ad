#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "plancomm/error.hpp"
#include "plancomm/planner.hpp"
#include "support.hpp"

using namespace plancomm;
using namespace plancomm::pddl;
using plancomm::testing::bfs_optimal_cost;
using plancomm::testing::load_domain;
using plancomm::testing::load_problem;

namespace {

// Route graph: s -> g directly, s -> m -> g, s -> n -> g.
const char* kRoutes = R"(
(define (domain routes) (:requirements :strips)
  (:predicates (at ?x) (edge ?x ?y))
  (:action go :parameters (?x ?y)
    :precondition (and (at ?x) (edge ?x ?y))
    :effect (and (at ?y) (not (at ?x)))))
)";

GroundInstance routes(const std::string& edges) {
  Domain d = parse_domain(kRoutes);
  Problem p = parse_problem("(define (problem r) (:objects s m n g) (:init (at s) " + edges +
                                ") (:goal (at g)))",
                            d);
  return ground(d, p);
}

std::vector<std::string> names(const GroundModel& m, const Plan& p) {
  std::vector<std::string> out;
  for (ActionId a : p.actions) out.push_back(m.action(a).str());
  return out;
}

}  // namespace

TEST(Planner, GoalInInitGivesEmptyPlan) {
  Domain d = load_domain("bench/blocks-world/domain.pddl");
  Problem p = parse_problem("(define (problem x) (:domain blocks-world) (:objects a b - block)"
                            " (:init (ontable a) (on b a) (clear b) (handempty)) (:goal (on b a)))",
                            d);
  auto plan = plan_optimal(ground(d, p));
  ASSERT_TRUE(plan);
  EXPECT_TRUE(plan->actions.empty());
}

TEST(Planner, TwoBlocks) {
  Domain d = load_domain("bench/blocks-world/domain.pddl");
  Problem p = parse_problem("(define (problem x) (:domain blocks-world) (:objects a b - block)"
                            " (:init (ontable a) (ontable b) (clear a) (clear b) (handempty))"
                            " (:goal (on a b)))",
                            d);
  GroundInstance g = ground(d, p);
  auto plan = plan_optimal(g);
  ASSERT_TRUE(plan);
  EXPECT_EQ(names(*g.model, *plan), (std::vector<std::string>{"(pick-up a)", "(stack a b)"}));
  EXPECT_TRUE(validate_plan(g, *plan));
  EXPECT_EQ(bfs_optimal_cost(g).cost, 2u);
}

TEST(Planner, UnreachableGoal) {
  GroundInstance g = routes("(edge s m)");
  EXPECT_FALSE(plan_optimal(g));
  EXPECT_FALSE(plan_topk(g, 3, 1.0));
  EXPECT_FALSE(bfs_optimal_cost(g).cost);
}

TEST(Planner, ExpansionCap) {
  Domain d = load_domain("bench/blocks-world/domain.pddl");
  GroundInstance g = ground(d, load_problem("bench/blocks-world/p01.pddl", d));
  SearchOptions opts;
  opts.max_expansions = 1;
  EXPECT_THROW(plan_optimal(g, opts), ResourceError);
}

TEST(Planner, HmaxAdmissibleAtInit) {
  for (const std::string dom : {"blocks-world", "logistics"}) {
    Domain d = load_domain("bench/" + dom + "/domain.pddl");
    for (const std::string& rel : plancomm::testing::bench_problems(dom)) {
      GroundInstance g = ground(d, load_problem(rel, d));
      auto h = hmax(g, g.init);
      auto plan = plan_optimal(g);
      ASSERT_TRUE(h && plan) << rel;
      EXPECT_LE(*h, plan->cost()) << rel;
    }
  }
}

TEST(TopK, SymmetricRoutesSplitEvenly) {
  GroundInstance g = routes("(edge s m) (edge m g) (edge s n) (edge n g)");
  auto set = plan_topk(g, 2, 1.0);
  ASSERT_TRUE(set);
  ASSERT_EQ(set->plans.size(), 2u);
  EXPECT_NEAR(set->weights[0], 0.5, 1e-12);
  EXPECT_NEAR(set->weights[1], 0.5, 1e-12);
  EXPECT_EQ(set->optimal_cost, 2u);
}

TEST(TopK, CostGapWithTauLn2) {
  GroundInstance g = routes("(edge s g) (edge s m) (edge m g)");
  auto set = plan_topk(g, 2, std::log(2.0));
  ASSERT_TRUE(set);
  ASSERT_EQ(set->plans.size(), 2u);
  EXPECT_EQ(set->plans[0].cost(), 1u);
  EXPECT_EQ(set->plans[1].cost(), 2u);
  EXPECT_NEAR(set->weights[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(set->weights[1], 1.0 / 3.0, 1e-12);
}

TEST(TopK, KZeroRejectedAndKOneIsOptimal) {
  GroundInstance g = routes("(edge s g) (edge s m) (edge m g)");
  EXPECT_THROW(plan_topk(g, 0, 1.0), RangeError);
  auto set = plan_topk(g, 1, 1.0);
  ASSERT_TRUE(set);
  ASSERT_EQ(set->plans.size(), 1u);
  EXPECT_DOUBLE_EQ(set->weights[0], 1.0);
}

TEST(TopK, FewerPlansThanRequested) {
  GroundInstance g = routes("(edge s g)");
  auto set = plan_topk(g, 5, 1.0);
  ASSERT_TRUE(set);
  EXPECT_EQ(set->plans.size(), 1u);
}

// Every plan valid and distinct, costs non-decreasing, weights follow the
// exponential law, first plan optimal.
TEST(TopK, SoundnessAndWeightLaw) {
  for (const std::string dom : {"blocks-world", "logistics"}) {
    Domain d = load_domain("bench/" + dom + "/domain.pddl");
    for (const std::string& rel : plancomm::testing::bench_problems(dom)) {
      GroundInstance g = ground(d, load_problem(rel, d));
      const double tau = 0.7;
      auto set = plan_topk(g, 4, tau);
      ASSERT_TRUE(set) << rel;
      auto best = plan_optimal(g);
      EXPECT_EQ(set->plans[0].cost(), best->cost()) << rel;
      EXPECT_EQ(set->optimal_cost, best->cost());
      double total = 0.0;
      for (std::size_t i = 0; i < set->plans.size(); ++i) {
        EXPECT_TRUE(validate_plan(g, set->plans[i])) << rel;
        if (i > 0) {
          EXPECT_LE(set->plans[i - 1].cost(), set->plans[i].cost());
          EXPECT_NE(set->plans[i - 1], set->plans[i]);
          double ratio = set->weights[i] / set->weights[0];
          double expect = std::exp(tau * (double(set->plans[0].cost()) - set->plans[i].cost()));
          EXPECT_NEAR(ratio, expect, 1e-12);
        }
        total += set->weights[i];
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

// Optimality against the BFS oracle on every bundled instance and every
// candidate goal whose state space fits under 1e5 states.
TEST(Planner, OptimalAgainstBfs) {
  std::size_t compared = 0;
  for (const std::string dom : {"blocks-world", "logistics"}) {
    Domain d = load_domain("bench/" + dom + "/domain.pddl");
    for (const std::string& rel : plancomm::testing::bench_problems(dom)) {
      Problem p = load_problem(rel, d);
      std::string hyps = rel.substr(0, rel.size() - 5) + ".hyps";
      auto pool = parse_goal_pool(read_file(plancomm::testing::data_path(hyps)));
      GroundOptions opts;
      for (const auto& goal : pool) opts.extra_atoms.insert(opts.extra_atoms.end(), goal.begin(), goal.end());
      GroundInstance base = ground(d, p, opts);
      for (const auto& goal : pool) {
        GroundInstance g = base.with(p.init, goal);
        auto ref = bfs_optimal_cost(g);
        if (!ref.exhausted) continue;
        auto plan = plan_optimal(g);
        ASSERT_EQ(plan.has_value(), ref.cost.has_value()) << rel;
        if (plan) {
          EXPECT_EQ(plan->cost(), *ref.cost) << rel;
          EXPECT_TRUE(validate_plan(g, *plan));
        }
        ++compared;
      }
    }
  }
  EXPECT_GT(compared, 50u);
}

TEST(Planner, ValidateRejectsBrokenPlans) {
  GroundInstance g = routes("(edge s m) (edge m g)");
  auto plan = plan_optimal(g);
  ASSERT_TRUE(plan);
  Plan reversed{{plan->actions.rbegin(), plan->actions.rend()}};
  EXPECT_FALSE(validate_plan(g, reversed));
  Plan truncated{{plan->actions.front()}};
  EXPECT_FALSE(validate_plan(g, truncated));
}

TEST(Planner, Deterministic) {
  Domain d = load_domain("bench/logistics/domain.pddl");
  GroundInstance g = ground(d, load_problem("bench/logistics/p03.pddl", d));
  auto a = plan_topk(g, 3, 1.0);
  auto b = plan_topk(g, 3, 1.0);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->plans, b->plans);
  EXPECT_EQ(format_plan(*g.model, a->plans[0]), format_plan(*g.model, b->plans[0]));
}
