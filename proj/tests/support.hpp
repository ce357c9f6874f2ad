#pragma once

// Test-only helpers: fixture loading and independent brute-force oracles.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "plancomm/ground.hpp"
#include "plancomm/mirror.hpp"
#include "plancomm/pddl.hpp"

namespace plancomm::testing {

inline std::string data_path(const std::string& rel) {
  return std::string(PLANCOMM_DATA_DIR) + "/" + rel;
}

inline pddl::Domain load_domain(const std::string& rel) {
  return pddl::parse_domain(pddl::read_file(data_path(rel)));
}

inline pddl::Problem load_problem(const std::string& rel, const pddl::Domain& d) {
  return pddl::parse_problem(pddl::read_file(data_path(rel)), d);
}

inline std::vector<std::string> bench_problems(const std::string& domain) {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(data_path("bench/" + domain)))
    if (e.path().extension() == ".pddl" && e.path().filename() != "domain.pddl")
      out.push_back("bench/" + domain + "/" + e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

struct BfsResult {
  std::optional<std::size_t> cost;
  std::size_t reachable_states = 0;
  bool exhausted = true;  // false when the state cap stopped the search
};

// Breadth-first search over sorted-vector states; shares nothing with the
// planner except the ground action lists.
inline BfsResult bfs_optimal_cost(const GroundInstance& inst,
                                  std::size_t state_cap = 100'000) {
  using State = std::vector<AtomId>;
  const auto& actions = inst.model->actions();
  State init = inst.init.members();
  State goal = inst.goal.members();
  auto satisfies = [&](const State& s) {
    return std::includes(s.begin(), s.end(), goal.begin(), goal.end());
  };
  std::map<State, std::size_t> depth;
  std::queue<State> frontier;
  depth[init] = 0;
  frontier.push(init);
  BfsResult r;
  while (!frontier.empty()) {
    State s = frontier.front();
    frontier.pop();
    std::size_t d = depth[s];
    if (satisfies(s) && !r.cost) r.cost = d;
    for (const GroundAction& a : actions) {
      if (!std::includes(s.begin(), s.end(), a.pre.begin(), a.pre.end())) continue;
      bool blocked = std::any_of(a.neg_pre.begin(), a.neg_pre.end(), [&](AtomId x) {
        return std::binary_search(s.begin(), s.end(), x);
      });
      if (blocked) continue;
      std::set<AtomId> next(s.begin(), s.end());
      for (AtomId x : a.del) next.erase(x);
      for (AtomId x : a.add) next.insert(x);
      State n(next.begin(), next.end());
      if (depth.count(n)) continue;
      if (depth.size() >= state_cap) {
        r.exhausted = false;
        r.reachable_states = depth.size();
        return r;
      }
      depth[n] = d + 1;
      frontier.push(std::move(n));
    }
  }
  r.reachable_states = depth.size();
  return r;
}

// Independent posterior oracle: walks every (plan, belief) pair and tests
// membership by comparing action strings.
inline double oracle_surviving_mass(const MirrorModel& model,
                                    const std::vector<std::string>& said) {
  double mass = 0.0;
  for (const Hypothesis& h : model.hypotheses()) {
    for (std::size_t p = 0; p < h.plans.plans.size(); ++p) {
      std::set<std::string> names;
      for (ActionId a : h.plans.plans[p].actions) names.insert(model.ground().action(a).str());
      bool ok = std::all_of(said.begin(), said.end(),
                            [&](const std::string& s) { return names.count(s) > 0; });
      if (ok) mass += h.prior * h.plans.weights[p];
    }
  }
  return mass;
}

// log P(plan_R, belief_R | o) - log P(plan_R, belief_R), from the oracle.
inline double oracle_information_gain(const MirrorModel& model,
                                      const std::vector<std::string>& said) {
  const Hypothesis& rh = model.hypotheses()[model.robot_hypothesis()];
  std::set<std::string> robot;
  for (ActionId a : model.robot_plan().actions) robot.insert(model.ground().action(a).str());
  for (const std::string& s : said)
    if (!robot.count(s)) return -INFINITY;
  double joint = rh.prior * rh.plans.weights[model.robot_plan_index()];
  double post = joint / oracle_surviving_mass(model, said);
  return std::log(post) - std::log(joint);
}

// Hypotheses over an action vocabulary of 0-arity labels; hypothesis 0,
// plan 0 is the robot's. Beliefs are told apart by a marker atom per index.
struct SyntheticHypothesis {
  double prior;
  std::vector<std::vector<std::string>> plans;
  std::vector<double> weights;  // empty: uniform
};

inline MirrorModel make_synthetic(const std::vector<std::string>& vocab,
                                  const std::vector<SyntheticHypothesis>& synth) {
  std::vector<pddl::GroundAtom> atoms;
  for (std::size_t i = 0; i < synth.size(); ++i) atoms.push_back({"h" + std::to_string(i), {}});
  std::sort(atoms.begin(), atoms.end());
  std::vector<std::string> sorted_vocab = vocab;
  std::sort(sorted_vocab.begin(), sorted_vocab.end());
  std::vector<GroundAction> actions;
  for (const std::string& v : sorted_vocab) actions.push_back(GroundAction{v, {}, {}, {}, {}, {}});
  auto model = std::make_shared<const GroundModel>(atoms, actions);
  std::vector<Hypothesis> hyps;
  for (std::size_t i = 0; i < synth.size(); ++i) {
    Hypothesis h;
    h.belief.init = model->make_set({{"h" + std::to_string(i), {}}});
    h.belief.goal = AtomSet(atoms.size());
    h.belief.goal_index = 0;
    h.prior = synth[i].prior;
    for (const auto& names : synth[i].plans) {
      Plan p;
      for (const std::string& n : names) p.actions.push_back(*model->find_action(n, {}));
      h.plans.plans.push_back(p);
    }
    h.plans.weights = synth[i].weights;
    if (h.plans.weights.empty())
      h.plans.weights.assign(h.plans.plans.size(), 1.0 / h.plans.plans.size());
    hyps.push_back(std::move(h));
  }
  Belief rb = hyps[0].belief;
  Plan rp = hyps[0].plans.plans[0];
  return MirrorModel::from_hypotheses(model, rb, rp, std::move(hyps), 1);
}

// Random synthetic ensemble: 1-8 hypotheses, 1-3 plans each, plan length
// 1-max_len over a 10-action vocabulary.
inline MirrorModel random_synthetic(std::mt19937_64& rng, std::size_t max_len = 12) {
  std::vector<std::string> vocab;
  for (int i = 0; i < 10; ++i) vocab.push_back("act" + std::to_string(i));
  auto uni = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::uniform_real_distribution<double> real(0.05, 1.0);
  std::vector<SyntheticHypothesis> hyps(uni(1, 8));
  for (auto& h : hyps) {
    h.prior = real(rng);
    std::size_t np = uni(1, 3);
    double total = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
      std::vector<std::string> plan;
      std::size_t len = uni(1, max_len);
      for (std::size_t i = 0; i < len; ++i) plan.push_back(vocab[uni(0, vocab.size() - 1)]);
      h.plans.push_back(plan);
      h.weights.push_back(real(rng));
      total += h.weights.back();
    }
    for (double& w : h.weights) w /= total;
  }
  return make_synthetic(vocab, hyps);
}

// All size-n subsets of {0..d-1} in lexicographic order.
inline std::vector<std::vector<std::size_t>> all_subsets(std::size_t d, std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (cur.size() == n) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < d; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

inline std::vector<std::string> action_names(const MirrorModel& m, const std::vector<ActionId>& ids) {
  std::vector<std::string> out;
  for (ActionId a : ids) out.push_back(m.ground().action(a).str());
  return out;
}

}  // namespace plancomm::testing
