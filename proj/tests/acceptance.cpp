// Acceptance run: one PASS/FAIL line per primary criterion. Exit status is
// non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>

#include "plancomm/bench.hpp"
#include "plancomm/error.hpp"
#include "plancomm/rng.hpp"
#include "plancomm/strategies.hpp"
#include "plancomm/warehouse.hpp"
#include "support.hpp"

using namespace plancomm;
namespace t = plancomm::testing;
using Clock = std::chrono::steady_clock;

namespace {

struct BenchInstance {
  std::string name;
  bench::InstanceSetup setup;
};

struct Bundle {
  pddl::Domain domain;
  std::vector<std::pair<std::string, pddl::Problem>> problems;
  std::vector<std::vector<std::vector<pddl::GroundAtom>>> pools;
};

const std::vector<std::string> kDomains = {"blocks-world", "logistics"};

Bundle load_bundle(const std::string& dom) {
  Bundle b{t::load_domain("bench/" + dom + "/domain.pddl"), {}, {}};
  for (const std::string& rel : t::bench_problems(dom)) {
    std::string stem = rel.substr(rel.rfind('/') + 1);
    stem = stem.substr(0, stem.size() - 5);
    b.problems.emplace_back(stem, t::load_problem(rel, b.domain));
    b.pools.push_back(pddl::parse_goal_pool(
        pddl::read_file(t::data_path("bench/" + dom + "/" + stem + ".hyps"))));
  }
  return b;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s  %s  (%s)\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  failures += !ok;
}

void guarded(const char* name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(name, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Brute force with the string-membership posterior: best IG over all
// N-subsets of the distinct robot actions.
double oracle_best(const MirrorModel& m, std::size_t n) {
  auto names = t::action_names(m, m.distinct_actions());
  double best = -INFINITY;
  for (const auto& subset : t::all_subsets(names.size(), n)) {
    std::vector<std::string> said;
    for (std::size_t i : subset) said.push_back(names[i]);
    best = std::max(best, t::oracle_information_gain(m, said));
  }
  return best;
}

void oracle_equivalence() {
  auto start = Clock::now();
  std::size_t models = 0, checks = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; models < 60 && seed < 20; ++seed)
    for (const std::string& dom : kDomains) {
      Bundle b = load_bundle(dom);
      for (std::size_t i = 0; i < b.problems.size() && models < 60; ++i) {
        bench::InstanceSetup s =
            bench::setup_instance(b.domain, b.problems[i].second, b.pools[i], derive_seed(seed, "oracle"));
        const MirrorModel& m = s.model;
        if (m.robot_plan().cost() > 12 || m.distinct_actions().empty()) continue;
        ++models;
        for (std::size_t n = 1; n <= std::min<std::size_t>(3, m.distinct_actions().size()); ++n) {
          Verbalization o = find_most_informative(m, n);
          double chosen = information_gain(m, o).value();
          double chosen_oracle = t::oracle_information_gain(m, t::action_names(m, o.actions));
          double best = oracle_best(m, n);
          worst = std::max({worst, std::fabs(chosen - best), std::fabs(chosen_oracle - best)});
          ++checks;
        }
      }
    }
  double secs = seconds_since(start);
  report("oracle equivalence of the most informative subset", models >= 50 && worst <= 1e-9 && secs < 60,
         fmt("%.0f models, %.0f (model,N) checks, max |IG - oracle| = %.3g, %.2f s", double(models),
             double(checks), worst, secs));
}

void zero_cross_entropy() {
  std::size_t cases = 0;
  bool ok = true;
  for (const std::string& dom : kDomains) {
    Bundle b = load_bundle(dom);
    for (std::size_t i = 0; i < b.problems.size(); ++i) {
      const pddl::Problem& p = b.problems[i].second;
      BeliefPrior prior = BeliefPrior::uniform(p.init, {}, 0.5, {p.goal});
      MirrorModel m = build_model(b.domain, p, prior, 0, {});
      ok &= m.hypotheses().size() == 1 && cross_entropy(m).value() == 0.0;
      ++cases;
    }
  }
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    t::SyntheticHypothesis h{1.0, {{}}, {1.0}};
    std::uniform_int_distribution<int> len(1, 10), act(0, 9);
    for (int j = len(rng); j > 0; --j) h.plans[0].push_back("act" + std::to_string(act(rng)));
    MirrorModel m = t::make_synthetic({"act0", "act1", "act2", "act3", "act4", "act5", "act6", "act7",
                                       "act8", "act9"},
                                      {h});
    ok &= cross_entropy(m).value() == 0.0;
    ++cases;
  }
  report("single-hypothesis cross-entropy is exactly 0", ok, fmt("%.0f models", double(cases)));
}

void minus_infinity_rule() {
  std::mt19937_64 rng(17);
  std::size_t cases = 0, bad = 0;
  while (cases < 1000) {
    MirrorModel m = t::random_synthetic(rng);
    std::vector<ActionId> outside;
    for (ActionId a = 0; a < m.ground().actions().size(); ++a)
      if (!m.in_robot_plan(a)) outside.push_back(a);
    if (outside.empty()) continue;
    std::vector<ActionId> o = m.distinct_actions();
    std::shuffle(o.begin(), o.end(), rng);
    o.resize(std::uniform_int_distribution<std::size_t>(0, o.size())(rng));
    ActionId injected = outside[std::uniform_int_distribution<std::size_t>(0, outside.size() - 1)(rng)];
    o.insert(o.begin() + std::uniform_int_distribution<std::size_t>(0, o.size())(rng), injected);
    bad += !information_gain(m, Verbalization::of(o)).is_neg_inf();
    ++cases;
  }
  report("verbalizations with an action outside the robot plan score -inf", bad == 0,
         fmt("%.0f injected cases, %.0f violations", double(cases), double(bad)));
}

std::vector<BenchInstance> benchmark_instances(const std::string& dom, std::uint64_t seed) {
  Bundle b = load_bundle(dom);
  std::vector<BenchInstance> out;
  for (std::size_t i = 0; i < b.problems.size(); ++i)
    out.push_back({b.problems[i].first,
                   bench::setup_instance(b.domain, b.problems[i].second, b.pools[i],
                                         derive_seed(seed, dom + "/" + b.problems[i].first))});
  return out;
}

void dominance() {
  auto start = Clock::now();
  std::size_t instances = 0, checks = 0, violations = 0;
  for (const std::string& dom : kDomains)
    for (const BenchInstance& bi : benchmark_instances(dom, 0)) {
      const MirrorModel& m = bi.setup.model;
      ++instances;
      for (std::size_t n = 1; n <= m.distinct_actions().size(); ++n) {
        double inf = conditional_cross_entropy(m, select(Strategy::Informative, m, n)).value();
        double inc = conditional_cross_entropy(m, select(Strategy::Increasing, m, n)).value();
        double dec = conditional_cross_entropy(m, select(Strategy::Decreasing, m, n)).value();
        violations += !(inf <= inc) + !(inf <= dec);
        ++checks;
      }
    }
  report("informative dominates increasing and decreasing at every N", violations == 0,
         fmt("%.0f instances, %.0f (instance,N) pairs, %.0f violations, %.2f s", double(instances),
             double(checks), double(violations), seconds_since(start)));
}

void fig4_direction() {
  auto start = Clock::now();
  bench::BenchConfig cfg;
  cfg.dataset_dir = t::data_path("bench");
  cfg.domains = kDomains;
  cfg.instances_per_domain = 12;
  cfg.seed = 0;
  auto results = bench::run_benchmark(cfg);
  bool ok = results.size() == kDomains.size();
  std::string detail;
  for (const auto& r : results) {
    std::string part;
    ok &= r.instances.size() >= 10;
    for (const auto& row : r.rows)
      if (row.x <= 0.3 + 1e-12) {
        ok &= row.h[bench::kDec] <= row.h[bench::kInc];
        part += fmt("x=%.1f H_dec %.3f <= H_inc %.3f; ", row.x, row.h[bench::kDec], row.h[bench::kInc]);
      }
    double inf = r.mean_first_dist(bench::kInf), inc = r.mean_first_dist(bench::kInc);
    ok &= inf < inc;
    detail += r.domain + " (" + std::to_string(r.instances.size()) + " instances): " + part +
             fmt("first D_G inf %.3f < inc %.3f", inf, inc) + " | ";
  }
  double secs = seconds_since(start);
  ok &= secs < 600;
  report("benchmark direction: decreasing beats increasing early, informative acts nearer the goal", ok,
         detail + fmt("%.2f s", secs));
}

void study_direction() {
  auto start = Clock::now();
  warehouse::StudyConfig cfg;
  cfg.num_scenarios = 100;
  cfg.seed = 0;
  warehouse::StudyResult r = warehouse::simulate_study(cfg);
  const auto& inf = r.curve(Strategy::Informative);
  const auto& dec = r.curve(Strategy::Decreasing);
  const auto& inc = r.curve(Strategy::Increasing);
  bool ok = r.scenarios >= 100;
  std::string detail;
  for (double f : {0.2, 0.4, 0.6}) {
    double a = inf.at(f).hit_ratio(), b = dec.at(f).hit_ratio(), c = inc.at(f).hit_ratio();
    ok &= a >= b - 0.02 && b >= c - 0.02;
    detail += fmt("%.1f: %.3f/%.3f/%.3f; ", f, a, b, c);
  }
  for (const auto* c : {&inf, &dec, &inc}) ok &= c->at(1.0).hit_ratio() == 1.0;
  double p = warehouse::significance_test(inf.earliest_correct, inc.earliest_correct);
  ok &= p < 0.01;
  report("simulated study: informative >= decreasing >= increasing, full plans always identified", ok,
         detail + fmt("at 1.0: %.3f/%.3f/%.3f; ", inf.at(1.0).hit_ratio(), dec.at(1.0).hit_ratio(),
                      inc.at(1.0).hit_ratio()) +
             fmt("p(inf < inc) = %.3g, %.2f s", p, seconds_since(start)));
}

void planner_optimality() {
  std::size_t compared = 0, mismatches = 0, skipped = 0;
  for (const std::string& dom : kDomains) {
    Bundle b = load_bundle(dom);
    for (std::size_t i = 0; i < b.problems.size(); ++i) {
      std::vector<std::vector<pddl::GroundAtom>> goals = {b.problems[i].second.goal};
      goals.insert(goals.end(), b.pools[i].begin(), b.pools[i].end());
      for (const auto& g : goals) {
        pddl::Problem p = b.problems[i].second;
        p.goal = g;
        GroundInstance inst = ground(b.domain, p);
        t::BfsResult oracle = t::bfs_optimal_cost(inst, 100'000);
        if (!oracle.exhausted && !oracle.cost) {
          ++skipped;
          continue;
        }
        auto plan = plan_optimal(inst);
        std::optional<std::size_t> got;
        if (plan) got = plan->cost();
        mismatches += got != oracle.cost || (plan && !validate_plan(inst, *plan));
        ++compared;
      }
    }
  }
  report("planner cost equals breadth-first optimum", compared > 0 && mismatches == 0,
         fmt("%.0f instance goals compared, %.0f above 1e5 states skipped, %.0f mismatches", double(compared),
             double(skipped), double(mismatches)));
}

void filtering_and_safety() {
  std::mt19937_64 rng(2718);
  std::size_t cases = 0, bad = 0;
  while (cases < 1000) {
    MirrorModel m = t::random_synthetic(rng);
    std::vector<ActionId> all = m.distinct_actions();
    std::shuffle(all.begin(), all.end(), rng);
    std::size_t k = std::uniform_int_distribution<std::size_t>(0, all.size() - 1)(rng);
    std::vector<ActionId> o(all.begin(), all.begin() + k);
    std::vector<ActionId> longer(all.begin(), all.begin() + k + 1);
    Posterior p = posterior(m, Verbalization::of(o));
    Posterior q = posterior(m, Verbalization::of(longer));
    const double wr_p = p.weight(m.robot_hypothesis(), m.robot_plan_index());
    const double wr_q = q.weight(m.robot_hypothesis(), m.robot_plan_index());
    bool ok = !p.all_eliminated() && !q.all_eliminated() && wr_p > 0 && wr_q >= wr_p - 1e-12;
    std::set<std::pair<std::size_t, std::size_t>> before;
    double total = 0.0;
    for (const JointEntry& e : p.entries()) {
      before.insert({e.hypothesis, e.plan});
      total += e.weight;
    }
    ok &= std::fabs(total - 1.0) < 1e-9;
    for (const JointEntry& e : q.entries()) {
      ok &= before.count({e.hypothesis, e.plan}) > 0;
      ok &= e.weight >= p.weight(e.hypothesis, e.plan) - 1e-12;
    }
    ok &= q.surviving_mass() <= p.surviving_mass() + 1e-15;
    ok &= information_gain(m, Verbalization::of(longer)).value() >=
          information_gain(m, Verbalization::of(o)).value() - 1e-12;
    bad += !ok;
    ++cases;
  }
  report("posterior filtering is monotone and never eliminates the robot's own plan", bad == 0,
         fmt("%.0f random (model, o) cases, %.0f violations", double(cases), double(bad)));
}

}  // namespace

int main() {
  guarded("oracle equivalence of the most informative subset", oracle_equivalence);
  guarded("single-hypothesis cross-entropy is exactly 0", zero_cross_entropy);
  guarded("verbalizations with an action outside the robot plan score -inf", minus_infinity_rule);
  guarded("informative dominates increasing and decreasing at every N", dominance);
  guarded("benchmark direction: decreasing beats increasing early, informative acts nearer the goal",
          fig4_direction);
  guarded("simulated study: informative >= decreasing >= increasing, full plans always identified",
          study_direction);
  guarded("planner cost equals breadth-first optimum", planner_optimality);
  guarded("posterior filtering is monotone and never eliminates the robot's own plan", filtering_and_safety);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
