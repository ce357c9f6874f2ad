// Command-line front end: planning, verbalization, the benchmark sweep,
// warehouse scenarios, the simulated study and the HTTP study service.

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "plancomm/bench.hpp"
#include "plancomm/config.hpp"
#include "plancomm/error.hpp"
#include "plancomm/planner.hpp"
#include "plancomm/service.hpp"
#include "plancomm/strategies.hpp"
#include "plancomm/warehouse.hpp"

using namespace plancomm;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kFailure = 1, kParse = 2, kUnsolvable = 3, kBadSize = 4, kResource = 5 };

struct BadSize : Error {
  using Error::Error;
};

std::string extended(const ExtendedReal& x) {
  if (x.is_pos_inf()) return "inf";
  if (x.is_neg_inf()) return "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x.value());
  return buf;
}

json extended_json(const ExtendedReal& x) {
  if (x.is_finite()) return x.value() + 0.0;  // no "-0.0"
  return extended(x);
}

struct VerbalizeArgs {
  std::string config, domain, problem, goal_pool, templates, strategy = "informative", format = "text";
  std::string out;
  long long n = 1;
  std::size_t robot_goal = 0, j = 0, k = 1;
  double theta = 0.5, tau = 1.0;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> warehouse_seed;
};

int run_verbalize(const VerbalizeArgs& a) {
  auto strategy = parse_strategy(a.strategy);
  if (!strategy) throw ValidationError("unknown strategy " + a.strategy);

  std::optional<MirrorModel> model;
  std::optional<TemplateTable> templates;
  if (a.warehouse_seed) {
    warehouse::Scenario s = warehouse::generate_scenario(*a.warehouse_seed);
    model = warehouse::build_scenario_model(s);
    templates = warehouse::templates(s);
  } else {
    ModelConfig c;
    if (!a.config.empty()) {
      c = ModelConfig::load(a.config);
    } else {
      if (a.domain.empty() || a.problem.empty())
        throw ValidationError("need --config, --warehouse-seed or both --domain and --problem");
      c.domain = a.domain;
      c.problem = a.problem;
      if (!a.goal_pool.empty()) c.goal_pool = a.goal_pool;
      c.robot_goal_index = a.robot_goal;
      c.uncertain_count = a.j;
      c.theta = {a.theta};
      c.k = a.k;
      c.tau = a.tau;
      c.seed = a.seed;
    }
    LoadedModel l = build_from_config(c);
    model = std::move(l.model);
    templates = std::move(l.templates);
  }
  if (!a.templates.empty()) templates = TemplateTable::load(a.templates);
  if (!templates) templates = TemplateTable{};

  const std::size_t distinct = model->distinct_actions().size();
  if (a.n < 1 || static_cast<std::size_t>(a.n) > distinct)
    throw BadSize("N = " + std::to_string(a.n) + " outside [1, " + std::to_string(distinct) + "]");
  Verbalization o = select(*strategy, *model, static_cast<std::size_t>(a.n));
  std::vector<std::string> sentences = render(o, model->ground(), *templates);
  ExtendedReal ig = information_gain(*model, o);
  ExtendedReal h = conditional_cross_entropy(*model, o);

  json j;
  j["strategy"] = std::string(to_string(*strategy));
  j["n"] = o.size();
  j["plan_length"] = model->robot_plan().cost();
  j["hypotheses"] = model->hypotheses().size();
  j["cross_entropy"] = extended_json(cross_entropy(*model));
  j["conditional_cross_entropy"] = extended_json(h);
  j["information_gain"] = extended_json(ig);
  j["actions"] = json::array();
  for (std::size_t i = 0; i < o.size(); ++i) {
    const GroundAction& g = model->ground().action(o.actions[i]);
    j["actions"].push_back({{"action", g.str()}, {"position", o.positions[i]}, {"sentence", sentences[i]}});
  }

  std::ostringstream text;
  for (const auto& s : sentences) text << s << '\n';
  text << "IG = " << extended(ig) << '\n';

  const std::string rendered = a.format == "json" ? j.dump(2) + "\n" : text.str();
  std::cout << rendered;
  if (!a.out.empty()) {
    std::ofstream(a.out + ".json") << j.dump(2) << '\n';
    std::ofstream(a.out + ".txt") << text.str();
  }
  return kOk;
}

int run_plan(const std::string& domain_path, const std::string& problem_path, std::size_t k,
             double tau) {
  pddl::Domain d = pddl::parse_domain(pddl::read_file(domain_path));
  pddl::Problem p = pddl::parse_problem(pddl::read_file(problem_path), d);
  GroundInstance inst = ground(d, p);
  auto set = plan_topk(inst, k, tau);
  if (!set) throw UnsolvableError("goal unreachable");
  for (std::size_t i = 0; i < set->plans.size(); ++i) {
    char w[32];
    std::snprintf(w, sizeof w, "%.6f", set->weights[i]);
    std::cout << "; plan " << i + 1 << " cost " << set->plans[i].cost() << " weight " << w << '\n'
              << format_plan(*inst.model, set->plans[i]);
  }
  return kOk;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string part; std::getline(in, part, ',');)
    if (!part.empty()) out.push_back(part);
  return out;
}

int run_bench(bench::BenchConfig cfg, const std::string& domains, const std::string& out_dir) {
  cfg.domains = split_commas(domains);
  fs::create_directories(out_dir);
  for (const bench::DomainResult& r : bench::run_benchmark(cfg)) {
    std::ofstream metrics(fs::path(out_dir) / (r.domain + "_metrics.csv"));
    bench::write_metrics_csv(metrics, r.rows);
    std::ofstream entropy(fs::path(out_dir) / (r.domain + "_entropy.csv"));
    bench::write_entropy_csv(entropy, r.rows);
    std::printf("%s: %zu instances, %zu failed; first-action D_G inc %.3f dec %.3f inf %.3f\n",
                r.domain.c_str(), r.instances.size(), r.failures.size(),
                r.mean_first_dist(bench::kInc), r.mean_first_dist(bench::kDec),
                r.mean_first_dist(bench::kInf));
    for (const auto& f : r.failures) std::printf("  %s: %s\n", f.instance.c_str(), f.reason.c_str());
  }
  return kOk;
}

int run_simulate(const warehouse::StudyConfig& cfg, const std::string& out) {
  warehouse::StudyResult r = warehouse::simulate_study(cfg);
  std::printf("%zu scenarios, mean plan length %.2f\n", r.scenarios, r.mean_plan_length);
  std::printf("%-12s", "fraction");
  for (const auto& c : r.curves) std::printf("%13s", std::string(to_string(c.strategy)).c_str());
  std::printf("\n");
  for (std::size_t b = 0; b <= 10; ++b) {
    std::printf("%-12.1f", b / 10.0);
    for (const auto& c : r.curves) std::printf("%13.3f", c.buckets[b].hit_ratio());
    std::printf("\n");
  }
  std::printf("%-12s", "earliest");
  for (const auto& c : r.curves) std::printf("%13.2f", c.mean_earliest());
  std::printf("\n");
  for (std::size_t i = 0; i < r.curves.size(); ++i)
    for (std::size_t j = 0; j < r.curves.size(); ++j)
      if (i != j && r.curves[i].strategy == Strategy::Informative && r.scenarios >= 2)
        std::printf("p(%s < %s) = %.6g\n", std::string(to_string(r.curves[i].strategy)).c_str(),
                    std::string(to_string(r.curves[j].strategy)).c_str(),
                    warehouse::significance_test(r.curves[i].earliest_correct,
                                                 r.curves[j].earliest_correct));
  if (!out.empty()) {
    std::ofstream f(out);
    warehouse::write_study_csv(f, r);
  }
  return kOk;
}

int run_serve(int port, std::uint64_t seed, const std::string& out_dir) {
  service::StudyService svc(out_dir, seed);
  httplib::Server server;
  service::mount(server, svc);
  std::printf("study service on http://0.0.0.0:%d, logs in %s\n", port, out_dir.c_str());
  std::fflush(stdout);
  if (!server.listen("0.0.0.0", port)) throw Error("cannot listen on port " + std::to_string(port));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plan verbalization toolkit"};
  app.require_subcommand(1);
  std::function<int()> action;

  VerbalizeArgs va;
  auto* verb = app.add_subcommand("verbalize", "Choose and render N actions of the robot plan");
  verb->add_option("--config", va.config, "JSON model config");
  verb->add_option("--domain", va.domain);
  verb->add_option("--problem", va.problem);
  verb->add_option("--goal-pool", va.goal_pool);
  verb->add_option("--robot-goal", va.robot_goal, "index into the goal pool");
  verb->add_option("-J,--uncertain", va.j, "number of uncertain initial atoms");
  verb->add_option("--theta", va.theta);
  verb->add_option("-k", va.k);
  verb->add_option("--tau", va.tau);
  verb->add_option("--seed", va.seed);
  verb->add_option("--warehouse-seed", va.warehouse_seed, "verbalize a generated warehouse scenario");
  verb->add_option("--templates", va.templates);
  verb->add_option("-s,--strategy", va.strategy)->check(
      CLI::IsMember({"increasing", "decreasing", "informative", "informative-nested"}));
  verb->add_option("-N,--n", va.n, "number of sentences")->required();
  verb->add_option("--format", va.format)->check(CLI::IsMember({"text", "json"}));
  verb->add_option("--out", va.out, "also write <out>.json and <out>.txt");
  verb->callback([&] { action = [&] { return run_verbalize(va); }; });

  std::string pd, pp;
  std::size_t pk = 1;
  double ptau = 1.0;
  auto* plan = app.add_subcommand("plan", "Optimal (or top-k) plans for a problem");
  plan->add_option("--domain", pd)->required();
  plan->add_option("--problem", pp)->required();
  plan->add_option("-k", pk);
  plan->add_option("--tau", ptau);
  plan->callback([&] { action = [&] { return run_plan(pd, pp, pk, ptau); }; });

  bench::BenchConfig bc;
  std::string bdomains = "blocks-world,logistics", bout = "bench-out";
  auto* bench_cmd = app.add_subcommand("bench", "Automated benchmark");
  bench_cmd->require_subcommand(1);
  auto* brun = bench_cmd->add_subcommand("run", "Sweep the strategies over plan fractions");
  brun->add_option("--dataset", bc.dataset_dir)->required();
  brun->add_option("--domains", bdomains, "comma-separated");
  brun->add_option("--seed", bc.seed);
  brun->add_option("--instances", bc.instances_per_domain);
  brun->add_option("--out", bout);
  brun->callback([&] { action = [&] { return run_bench(bc, bdomains, bout); }; });

  std::uint64_t wseed = 0;
  std::string wout = "warehouse";
  auto* wh = app.add_subcommand("warehouse", "Warehouse scenarios");
  wh->require_subcommand(1);
  auto* wgen = wh->add_subcommand("generate", "Write a scenario's PDDL, JSON and templates");
  wgen->add_option("--seed", wseed);
  wgen->add_option("--out", wout);
  wgen->callback([&] {
    action = [&] {
      warehouse::Scenario s = warehouse::generate_scenario(wseed);
      warehouse::write_scenario_files(s, wout);
      std::printf("scenario %llu written to %s (true goal %zu)\n",
                  static_cast<unsigned long long>(wseed), wout.c_str(), s.true_goal);
      return int(kOk);
    };
  });

  warehouse::StudyConfig sc;
  std::string sout, replay_log;
  auto* study = app.add_subcommand("study", "Simulated study and session logs");
  study->require_subcommand(1);
  auto* sim = study->add_subcommand("simulate", "Simulated observers over generated scenarios");
  sim->add_option("--scenarios", sc.num_scenarios);
  sim->add_option("--seed", sc.seed);
  sim->add_option("--threshold", sc.threshold);
  sim->add_option("--out", sout, "hit-ratio CSV");
  sim->callback([&] { action = [&] { return run_simulate(sc, sout); }; });
  auto* replay = study->add_subcommand("replay", "Recompute results from a session log");
  replay->add_option("--log", replay_log)->required();
  replay->callback([&] {
    action = [&] {
      std::cout << service::replay_results(replay_log) << '\n';
      return int(kOk);
    };
  });

  int port = 8080;
  std::uint64_t sseed = 0;
  std::string sdir = "sessions";
  auto* serve = app.add_subcommand("serve", "HTTP study service");
  serve->add_option("--port", port);
  serve->add_option("--seed", sseed);
  serve->add_option("--out", sdir);
  serve->callback([&] { action = [&] { return run_serve(port, sseed, sdir); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    return action();
  } catch (const BadSize& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadSize;
  } catch (const UnsolvableError& e) {
    std::cerr << "unsolvable: " << e.what() << '\n';
    return kUnsolvable;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kResource;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
