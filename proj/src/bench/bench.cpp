#include "plancomm/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>

#include "plancomm/error.hpp"
#include "plancomm/rng.hpp"
#include "plancomm/strategies.hpp"

namespace plancomm::bench {

namespace {

namespace fs = std::filesystem;

std::vector<pddl::GroundAtom> sorted(std::vector<pddl::GroundAtom> g) {
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

bool touches_goal(const GroundAction& a, const AtomSet& goal) {
  auto hit = [&](AtomId x) { return goal.contains(x); };
  return std::any_of(a.add.begin(), a.add.end(), hit) ||
         std::any_of(a.del.begin(), a.del.end(), hit);
}

}  // namespace

InstanceSetup setup_instance(const pddl::Domain& domain, const pddl::Problem& problem,
                             const std::vector<std::vector<pddl::GroundAtom>>& goal_pool,
                             std::uint64_t seed, const SetupOptions& options) {
  if (options.goals_per_model == 0) throw RangeError("goals_per_model must be positive");
  if (goal_pool.size() < options.goals_per_model)
    throw ValidationError("goal pool has " + std::to_string(goal_pool.size()) +
                          " goals, need " + std::to_string(options.goals_per_model));
  Rng rng(seed);
  InstanceSetup s;
  s.robot_pool_index = rng.below(goal_pool.size());
  s.pool_indices.push_back(s.robot_pool_index);
  std::set<std::vector<pddl::GroundAtom>> seen{sorted(goal_pool[s.robot_pool_index])};
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < goal_pool.size(); ++i)
    if (i != s.robot_pool_index) rest.push_back(i);
  rng.shuffle(rest);
  for (std::size_t i : rest) {
    if (s.pool_indices.size() == options.goals_per_model) break;
    if (seen.insert(sorted(goal_pool[i])).second) s.pool_indices.push_back(i);
  }
  if (s.pool_indices.size() < options.goals_per_model)
    throw ValidationError("goal pool has fewer than " + std::to_string(options.goals_per_model) +
                          " distinct goals");

  std::vector<std::vector<pddl::GroundAtom>> goals;
  for (std::size_t i : s.pool_indices) goals.push_back(goal_pool[i]);

  // Same universe build_model will use, so the plan found here is its plan.
  pddl::Problem robot = problem;
  robot.goal = goals[0];
  GroundOptions gopts;
  for (const auto& g : goals) gopts.extra_atoms.insert(gopts.extra_atoms.end(), g.begin(), g.end());
  GroundInstance inst = ground(domain, robot, gopts);
  auto plan = plan_optimal(inst);
  if (!plan) throw UnsolvableError("robot instance is unsolvable");

  std::set<AtomId> needed;
  for (ActionId a : plan->actions)
    for (AtomId x : inst.model->action(a).pre)
      if (inst.init.contains(x)) needed.insert(x);
  std::vector<AtomId> candidates(needed.begin(), needed.end());
  if (candidates.size() < options.uncertain_atoms)
    s.warnings.push_back("only " + std::to_string(candidates.size()) +
                         " precondition atoms available for " +
                         std::to_string(options.uncertain_atoms) + " uncertain atoms");
  std::vector<std::size_t> picked = rng.sample(candidates.size(), options.uncertain_atoms);
  std::sort(picked.begin(), picked.end());
  for (std::size_t i : picked) s.uncertain.push_back(inst.model->atom(candidates[i]));

  std::vector<pddl::GroundAtom> base;
  for (const auto& a : sorted(problem.init))
    if (!std::binary_search(s.uncertain.begin(), s.uncertain.end(), a)) base.push_back(a);

  BeliefPrior prior = BeliefPrior::uniform(base, s.uncertain, options.theta, goals);
  BuildOptions bopts;
  bopts.k = options.k;
  bopts.tau = options.tau;
  s.model = build_model(domain, robot, prior, 0, std::vector<bool>(s.uncertain.size(), true), bopts);
  return s;
}

Distance distance_to_goal(const MirrorModel& model, std::size_t action_index) {
  const auto& actions = model.robot_plan().actions;
  const std::size_t len = actions.size();
  if (action_index >= len) throw RangeError("action index outside the robot plan");
  const AtomSet& goal = model.robot_belief().goal;
  for (std::size_t j = action_index; j < len; ++j)
    if (touches_goal(model.ground().action(actions[j]), goal))
      return {static_cast<double>(j - action_index) / len, false};
  return {static_cast<double>(len - action_index) / len, true};
}

std::size_t verbalization_size(double fraction, std::size_t plan_length, std::size_t distinct) {
  auto n = static_cast<std::size_t>(std::floor(fraction * plan_length + 0.5));
  return std::min(std::max<std::size_t>(n, 1), distinct);
}

InstanceResult evaluate_instance(const std::string& name, const MirrorModel& model,
                                 const std::vector<double>& fractions) {
  InstanceResult r;
  r.name = name;
  r.plan_length = model.robot_plan().cost();
  r.hypotheses = model.hypotheses().size();
  r.h_prior = cross_entropy(model).value();
  const std::size_t distinct = model.distinct_actions().size();
  if (distinct == 0) throw RangeError("robot plan is empty; nothing to verbalize");

  std::map<std::size_t, Verbalization> informative;
  auto inf_at = [&](std::size_t n) -> const Verbalization& {
    auto it = informative.find(n);
    if (it == informative.end()) it = informative.emplace(n, find_most_informative(model, n)).first;
    return it->second;
  };

  r.first_dist[kInc] = distance_to_goal(model, select(Strategy::Increasing, model, 1).positions[0]).value;
  r.first_dist[kDec] = distance_to_goal(model, select(Strategy::Decreasing, model, 1).positions[0]).value;
  r.first_dist[kInf] = distance_to_goal(model, inf_at(1).positions[0]).value;

  for (double x : fractions) {
    CurvePoint p;
    p.x = x;
    p.n = verbalization_size(x, r.plan_length, distinct);
    Verbalization inc = select(Strategy::Increasing, model, p.n);
    Verbalization dec = select(Strategy::Decreasing, model, p.n);
    const Verbalization& inf = inf_at(p.n);
    p.h[kInc] = conditional_cross_entropy(model, inc).value();
    p.h[kDec] = conditional_cross_entropy(model, dec).value();
    p.h[kInf] = conditional_cross_entropy(model, inf).value();
    for (int s = 0; s < 3; ++s) p.gain[s] = p.h[s] - p.h[kInf];

    auto dist = [&](std::size_t pos) {
      Distance d = distance_to_goal(model, pos);
      p.flagged = p.flagged || d.flagged;
      return d.value;
    };
    p.dist[kInc] = dist(inc.positions.back());
    p.dist[kDec] = dist(dec.positions.back());

    std::optional<std::size_t> fresh;
    for (std::size_t i = 0; i < inf.size(); ++i) {
      bool known = false;
      if (p.n > 1) {
        const auto& prev = inf_at(p.n - 1).actions;
        known = std::find(prev.begin(), prev.end(), inf.actions[i]) != prev.end();
      }
      if (!known && (!fresh || inf.positions[i] < *fresh)) fresh = inf.positions[i];
    }
    if (!fresh) {
      p.flagged = true;
      fresh = *std::min_element(inf.positions.begin(), inf.positions.end());
    }
    p.dist[kInf] = dist(*fresh);
    r.points.push_back(p);
  }
  return r;
}

double DomainResult::mean_first_dist(StrategyColumn s) const {
  if (instances.empty()) return 0.0;
  double total = 0.0;
  for (const InstanceResult& r : instances) total += r.first_dist[s];
  return total / instances.size();
}

void BenchConfig::validate() const {
  if (fractions.empty()) throw ValidationError("no plan fractions");
  for (double x : fractions)
    if (!(x > 0.0 && x <= 1.0)) throw ValidationError("plan fraction outside (0, 1]");
  if (domains.empty()) throw ValidationError("no benchmark domains");
}

std::vector<MetricsRow> average(const std::vector<InstanceResult>& instances) {
  std::vector<MetricsRow> rows;
  if (instances.empty()) return rows;
  rows.resize(instances.front().points.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    MetricsRow& row = rows[i];
    row.x = instances.front().points[i].x;
    for (const InstanceResult& r : instances) {
      const CurvePoint& p = r.points.at(i);
      for (int s = 0; s < 3; ++s) {
        row.h[s] += p.h[s];
        row.gain[s] += p.gain[s];
        row.dist[s] += p.dist[s];
      }
      row.flagged += p.flagged;
    }
    row.instances = instances.size();
    for (int s = 0; s < 3; ++s) {
      row.h[s] /= row.instances;
      row.gain[s] /= row.instances;
      row.dist[s] /= row.instances;
    }
  }
  return rows;
}

std::vector<DomainResult> run_benchmark(const BenchConfig& config) {
  config.validate();
  std::vector<DomainResult> out;
  for (const std::string& name : config.domains) {
    DomainResult dr;
    dr.domain = name;
    fs::path dir = fs::path(config.dataset_dir) / name;
    pddl::Domain domain = pddl::parse_domain(pddl::read_file((dir / "domain.pddl").string()));
    std::vector<fs::path> problems;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".pddl" && e.path().filename() != "domain.pddl")
        problems.push_back(e.path());
    std::sort(problems.begin(), problems.end());
    if (problems.size() > config.instances_per_domain) problems.resize(config.instances_per_domain);

    for (const fs::path& path : problems) {
      std::string stem = path.stem().string();
      try {
        pddl::Problem problem = pddl::parse_problem(pddl::read_file(path.string()), domain);
        fs::path hyps = path;
        hyps.replace_extension(".hyps");
        auto pool = pddl::parse_goal_pool(pddl::read_file(hyps.string()));
        InstanceSetup s = setup_instance(domain, problem, pool, derive_seed(config.seed, name + "/" + stem),
                                 config.setup);
        dr.instances.push_back(evaluate_instance(stem, s.model, config.fractions));
      } catch (const Error& e) {
        dr.failures.push_back({stem, e.what()});
      }
    }
    dr.rows = average(dr.instances);
    out.push_back(std::move(dr));
  }
  return out;
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << "x,e_gain_inc,e_gain_dec,e_gain_ent,g_dist_inc,g_dist_dec,g_dist_ent\n";
  for (const MetricsRow& r : rows)
    out << num(r.x) << ',' << num(r.gain[kInc]) << ',' << num(r.gain[kDec]) << ','
        << num(r.gain[kInf]) << ',' << num(r.dist[kInc]) << ',' << num(r.dist[kDec]) << ','
        << num(r.dist[kInf]) << '\n';
}

void write_entropy_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << "x,h_inc,h_dec,h_ent,instances,flagged\n";
  for (const MetricsRow& r : rows)
    out << num(r.x) << ',' << num(r.h[kInc]) << ',' << num(r.h[kDec]) << ',' << num(r.h[kInf])
        << ',' << r.instances << ',' << r.flagged << '\n';
}

}  // namespace plancomm::bench
