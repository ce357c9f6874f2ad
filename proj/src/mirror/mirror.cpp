#include "plancomm/mirror.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "plancomm/error.hpp"

namespace plancomm {

namespace {

constexpr double kSumTolerance = 1e-9;
// Relative slack under which two subset masses count as a tie.
constexpr double kTieTolerance = 1e-12;

std::vector<ActionId> sorted_unique(std::vector<ActionId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool plan_contains(const Plan& plan, ActionId a) {
  return std::find(plan.actions.begin(), plan.actions.end(), a) != plan.actions.end();
}

}  // namespace

// Scores subsets of the robot's distinct actions against the grouped masks.
class SubsetScorer {
 public:
  explicit SubsetScorer(const MirrorModel& m)
      : m_(m), words_(m.mask_words_), subset_(m.mask_words_, 0) {}

  void clear() { std::fill(subset_.begin(), subset_.end(), 0); }
  void set(std::size_t i) { subset_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { subset_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  double mass() const {
    double total = 0.0;
    const std::size_t groups = m_.group_mass_.size();
    for (std::size_t g = 0; g < groups; ++g) {
      const std::uint64_t* mask = &m_.group_masks_[g * words_];
      bool ok = true;
      for (std::size_t w = 0; w < words_ && ok; ++w) ok = (subset_[w] & ~mask[w]) == 0;
      if (ok) total += m_.group_mass_[g];
    }
    return total;
  }

 private:
  const MirrorModel& m_;
  std::size_t words_;
  std::vector<std::uint64_t> subset_;
};

void BeliefPrior::validate() const {
  if (theta.size() != uncertain_atoms.size())
    throw ValidationError("belief prior: one theta per uncertain atom required");
  for (double t : theta)
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("belief prior: theta outside [0, 1]");
  if (goal_pool.empty()) throw ValidationError("belief prior: empty goal pool");
  if (goal_theta.size() != goal_pool.size())
    throw ValidationError("belief prior: one goal probability per goal required");
  double sum = 0.0;
  for (double t : goal_theta) {
    if (!(t >= 0.0)) throw ValidationError("belief prior: negative goal probability");
    sum += t;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw ValidationError("belief prior: goal probabilities sum to " + std::to_string(sum));
  std::set<pddl::GroundAtom> base(base_init.begin(), base_init.end());
  std::set<pddl::GroundAtom> seen;
  for (const pddl::GroundAtom& a : uncertain_atoms) {
    if (base.count(a)) throw ValidationError("uncertain atom " + a.str() + " is in base init");
    if (!seen.insert(a).second) throw ValidationError("duplicate uncertain atom " + a.str());
  }
}

BeliefPrior BeliefPrior::uniform(std::vector<pddl::GroundAtom> base_init,
                                 std::vector<pddl::GroundAtom> uncertain_atoms, double p,
                                 std::vector<std::vector<pddl::GroundAtom>> goal_pool) {
  BeliefPrior prior;
  prior.base_init = std::move(base_init);
  prior.theta.assign(uncertain_atoms.size(), p);
  prior.uncertain_atoms = std::move(uncertain_atoms);
  prior.goal_theta.assign(goal_pool.size(), 1.0 / static_cast<double>(goal_pool.size()));
  prior.goal_pool = std::move(goal_pool);
  return prior;
}

Verbalization Verbalization::of(std::vector<ActionId> actions) {
  Verbalization v;
  v.positions.assign(actions.size(), 0);
  v.actions = std::move(actions);
  return v;
}

MirrorModel MirrorModel::from_hypotheses(std::shared_ptr<const GroundModel> model,
                                         Belief robot_belief, Plan robot_plan,
                                         std::vector<Hypothesis> hypotheses,
                                         std::size_t goal_count) {
  MirrorModel m;
  m.model_ = std::move(model);
  m.robot_belief_ = std::move(robot_belief);
  m.robot_plan_ = std::move(robot_plan);
  m.goal_count_ = goal_count;

  double total = 0.0;
  for (const Hypothesis& h : hypotheses) {
    if (!(h.prior > 0.0)) throw ValidationError("hypothesis prior must be positive");
    if (h.plans.plans.empty() || h.plans.plans.size() != h.plans.weights.size())
      throw ValidationError("hypothesis without a weighted plan set");
    if (h.belief.goal_index >= goal_count) throw ValidationError("goal index out of range");
    total += h.prior;
  }
  for (Hypothesis& h : hypotheses) h.prior /= total;
  m.hypotheses_ = std::move(hypotheses);

  bool found = false;
  for (std::size_t i = 0; i < m.hypotheses_.size() && !found; ++i) {
    if (!(m.hypotheses_[i].belief == m.robot_belief_)) continue;
    const auto& plans = m.hypotheses_[i].plans.plans;
    auto it = std::find(plans.begin(), plans.end(), m.robot_plan_);
    if (it == plans.end()) continue;
    m.robot_hyp_ = i;
    m.robot_plan_idx_ = static_cast<std::size_t>(it - plans.begin());
    found = true;
  }
  if (!found)
    throw Error("mirror model: robot plan missing from its own hypothesis");

  for (std::size_t pos = 0; pos < m.robot_plan_.actions.size(); ++pos) {
    ActionId a = m.robot_plan_.actions[pos];
    if (std::find(m.distinct_.begin(), m.distinct_.end(), a) != m.distinct_.end()) continue;
    m.distinct_.push_back(a);
    m.first_pos_.push_back(pos);
  }

  // Group (plan, belief) pairs by their membership mask over distinct robot
  // actions, in first-appearance order so mass sums are reproducible.
  m.mask_words_ = std::max<std::size_t>(1, (m.distinct_.size() + 63) / 64);
  std::map<std::vector<std::uint64_t>, std::size_t> group_of;
  for (const Hypothesis& h : m.hypotheses_) {
    for (std::size_t p = 0; p < h.plans.plans.size(); ++p) {
      std::vector<std::uint64_t> mask(m.mask_words_, 0);
      for (std::size_t i = 0; i < m.distinct_.size(); ++i)
        if (plan_contains(h.plans.plans[p], m.distinct_[i]))
          mask[i >> 6] |= std::uint64_t{1} << (i & 63);
      double w = h.prior * h.plans.weights[p];
      auto [it, inserted] = group_of.emplace(mask, m.group_mass_.size());
      if (inserted) {
        m.group_masks_.insert(m.group_masks_.end(), mask.begin(), mask.end());
        m.group_mass_.push_back(w);
      } else {
        m.group_mass_[it->second] += w;
      }
    }
  }
  return m;
}

double MirrorModel::robot_joint() const {
  const Hypothesis& h = hypotheses_[robot_hyp_];
  return h.prior * h.plans.weights[robot_plan_idx_];
}

bool MirrorModel::in_robot_plan(ActionId a) const {
  return std::find(distinct_.begin(), distinct_.end(), a) != distinct_.end();
}

double MirrorModel::surviving_mass(const std::vector<std::size_t>& subset) const {
  SubsetScorer scorer(*this);
  for (std::size_t i : subset) {
    if (i >= distinct_.size()) throw RangeError("subset index out of range");
    scorer.set(i);
  }
  return scorer.mass();
}

MirrorModel build_model(const pddl::Domain& domain, const pddl::Problem& problem_template,
                        const BeliefPrior& prior, std::size_t robot_goal_index,
                        const std::vector<bool>& robot_init_choices,
                        const BuildOptions& options) {
  prior.validate();
  const std::size_t J = prior.uncertain_atoms.size();
  const std::size_t m = prior.goal_pool.size();
  if (J > options.max_uncertain_atoms || J > 31)
    throw ResourceError("mirror model: " + std::to_string(J) + " uncertain atoms exceeds the " +
                        std::to_string(options.max_uncertain_atoms) + " atom guard");
  if (robot_goal_index >= m) throw RangeError("robot goal index out of range");
  if (robot_init_choices.size() != J)
    throw ValidationError("robot init choices must cover every uncertain atom");

  pddl::Problem joint = problem_template;
  joint.init = prior.base_init;
  joint.init.insert(joint.init.end(), prior.uncertain_atoms.begin(), prior.uncertain_atoms.end());
  for (const auto& a : joint.init) pddl::validate_ground_atom(a, domain, joint);
  GroundOptions gopts = options.grounding;
  for (const auto& goal : prior.goal_pool) {
    for (const auto& a : goal) {
      pddl::validate_ground_atom(a, domain, joint);
      gopts.extra_atoms.push_back(a);
    }
  }
  joint.goal = prior.goal_pool[robot_goal_index];
  GroundInstance base = ground(domain, joint, gopts);

  auto variant = [&](std::uint32_t choices, std::size_t goal) {
    std::vector<pddl::GroundAtom> init = prior.base_init;
    for (std::size_t j = 0; j < J; ++j)
      if (choices >> j & 1u) init.push_back(prior.uncertain_atoms[j]);
    return base.with(init, prior.goal_pool[goal]);
  };

  std::uint32_t robot_choices = 0;
  for (std::size_t j = 0; j < J; ++j)
    if (robot_init_choices[j]) robot_choices |= 1u << j;
  GroundInstance robot_inst = variant(robot_choices, robot_goal_index);
  auto robot_plan = plan_optimal(robot_inst, options.search);
  if (!robot_plan) throw UnsolvableError("robot belief is unsolvable");
  Belief robot_belief{robot_inst.init, robot_inst.goal, robot_goal_index, robot_choices};

  std::vector<Hypothesis> hyps;
  bool robot_has_mass = false;
  for (std::size_t g = 0; g < m; ++g) {
    for (std::uint32_t mask = 0; mask < (1u << J); ++mask) {
      double p = prior.goal_theta[g];
      for (std::size_t j = 0; j < J; ++j)
        p *= (mask >> j & 1u) ? prior.theta[j] : 1.0 - prior.theta[j];
      if (!(p > 0.0)) continue;
      GroundInstance inst = variant(mask, g);
      auto plans = plan_topk(inst, options.k, options.tau, options.search);
      if (!plans) continue;
      if (g == robot_goal_index && mask == robot_choices) robot_has_mass = true;
      hyps.push_back(Hypothesis{Belief{inst.init, inst.goal, g, mask}, p, std::move(*plans)});
    }
  }
  if (!robot_has_mass) throw ValidationError("robot belief has zero prior probability");
  return MirrorModel::from_hypotheses(base.model, std::move(robot_belief),
                                      std::move(*robot_plan), std::move(hyps), m);
}

Posterior::Posterior(std::vector<JointEntry> entries, double surviving_mass)
    : entries_(std::move(entries)), mass_(surviving_mass) {}

double Posterior::weight(std::size_t hypothesis, std::size_t plan) const {
  for (const JointEntry& e : entries_)
    if (e.hypothesis == hypothesis && e.plan == plan) return e.weight;
  return 0.0;
}

std::vector<double> Posterior::goal_marginals(const MirrorModel& model) const {
  std::vector<double> out(model.goal_count(), 0.0);
  for (const JointEntry& e : entries_)
    out[model.hypotheses()[e.hypothesis].belief.goal_index] += e.weight;
  return out;
}

Posterior prior_joint(const MirrorModel& model) { return posterior(model, Verbalization{}); }

Posterior posterior(const MirrorModel& model, const Verbalization& o) {
  const std::vector<ActionId> wanted = sorted_unique(o.actions);
  std::vector<JointEntry> entries;
  double mass = 0.0;
  const auto& hyps = model.hypotheses();
  for (std::size_t h = 0; h < hyps.size(); ++h) {
    for (std::size_t p = 0; p < hyps[h].plans.plans.size(); ++p) {
      const std::vector<ActionId> have = sorted_unique(hyps[h].plans.plans[p].actions);
      if (!std::includes(have.begin(), have.end(), wanted.begin(), wanted.end())) continue;
      double w = hyps[h].prior * hyps[h].plans.weights[p];
      entries.push_back(JointEntry{h, p, w});
      mass += w;
    }
  }
  if (!(mass > 0.0)) return Posterior({}, 0.0);
  for (JointEntry& e : entries) e.weight /= mass;
  return Posterior(std::move(entries), mass);
}

ExtendedReal cross_entropy(const MirrorModel& model) {
  const Hypothesis& h = model.hypotheses()[model.robot_hypothesis()];
  return ExtendedReal::neg_log(h.plans.weights[model.robot_plan_index()]) +
         ExtendedReal::neg_log(h.prior);
}

namespace {

// Indices into distinct_actions(); nullopt if some action is not in the robot plan.
std::optional<std::vector<std::size_t>> robot_subset(const MirrorModel& model,
                                                     const Verbalization& o) {
  std::vector<std::size_t> idx;
  const auto& distinct = model.distinct_actions();
  for (ActionId a : o.actions) {
    auto it = std::find(distinct.begin(), distinct.end(), a);
    if (it == distinct.end()) return std::nullopt;
    idx.push_back(static_cast<std::size_t>(it - distinct.begin()));
  }
  return idx;
}

}  // namespace

ExtendedReal conditional_cross_entropy(const MirrorModel& model, const Verbalization& o) {
  auto subset = robot_subset(model, o);
  if (!subset) return ExtendedReal::pos_inf();
  if (subset->empty()) return cross_entropy(model);
  return ExtendedReal::neg_log(model.robot_joint() / model.surviving_mass(*subset));
}

ExtendedReal information_gain(const MirrorModel& model, const Verbalization& o) {
  auto subset = robot_subset(model, o);
  if (!subset) return ExtendedReal::neg_inf();
  if (subset->empty()) return ExtendedReal(0.0);
  // H - H|o = -ln(surviving prior mass)
  return ExtendedReal::neg_log(model.surviving_mass(*subset));
}

namespace {

Verbalization plan_sorted(const MirrorModel& model, std::vector<std::size_t> subset) {
  std::sort(subset.begin(), subset.end());
  Verbalization v;
  for (std::size_t i : subset) {
    v.actions.push_back(model.distinct_actions()[i]);
    v.positions.push_back(model.first_positions()[i]);
  }
  return v;
}

void check_size(const MirrorModel& model, std::size_t n) {
  if (n < 1 || n > model.distinct_actions().size())
    throw RangeError("verbalization size " + std::to_string(n) + " outside [1, " +
                     std::to_string(model.distinct_actions().size()) + "]");
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i)
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace

Verbalization find_most_informative(const MirrorModel& model, std::size_t n,
                                    std::size_t max_subsets) {
  check_size(model, n);
  const std::size_t d = model.distinct_actions().size();
  if (binomial(d, n) > static_cast<double>(max_subsets))
    throw ResourceError("C(" + std::to_string(d) + ", " + std::to_string(n) +
                        ") subsets exceed the enumeration cap");

  SubsetScorer scorer(model);
  std::vector<std::size_t> combo(n);
  std::iota(combo.begin(), combo.end(), 0);
  for (std::size_t i : combo) scorer.set(i);

  std::vector<std::size_t> best = combo;
  double best_mass = scorer.mass();
  while (true) {
    // Advance to the next combination in lexicographic order.
    std::size_t i = n;
    while (i > 0 && combo[i - 1] == d - n + (i - 1)) --i;
    if (i == 0) break;
    --i;
    for (std::size_t j = i; j < n; ++j) scorer.reset(combo[j]);
    ++combo[i];
    for (std::size_t j = i + 1; j < n; ++j) combo[j] = combo[j - 1] + 1;
    for (std::size_t j = i; j < n; ++j) scorer.set(combo[j]);

    double mass = scorer.mass();
    if (mass < best_mass * (1.0 - kTieTolerance)) {
      best_mass = mass;
      best = combo;
    }
  }
  return plan_sorted(model, best);
}

Verbalization find_most_informative_nested(const MirrorModel& model, std::size_t n) {
  check_size(model, n);
  const std::size_t d = model.distinct_actions().size();
  SubsetScorer scorer(model);
  std::vector<std::size_t> chosen;
  std::vector<char> used(d, 0);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = d;
    double best_mass = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      if (used[i]) continue;
      scorer.set(i);
      double mass = scorer.mass();
      scorer.reset(i);
      if (best == d || mass < best_mass * (1.0 - kTieTolerance)) {
        best = i;
        best_mass = mass;
      }
    }
    used[best] = 1;
    scorer.set(best);
    chosen.push_back(best);
  }
  return plan_sorted(model, chosen);
}

}  // namespace plancomm
