#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "plancomm/service.hpp"
#include "plancomm/warehouse.hpp"
#include "support.hpp"

using namespace plancomm;
namespace fs = std::filesystem;
namespace t = plancomm::testing;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const std::string& args) {
  std::string cmd = std::string(PLANCOMM_CLI) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(CliVerbalize, IncreasingFirstSentenceIsFirstPlanAction) {
  warehouse::Scenario s = warehouse::generate_scenario(7);
  MirrorModel m = warehouse::build_scenario_model(s);
  std::string expected = warehouse::templates(s).render(m.ground().action(m.robot_plan().actions[0]));
  CliRun r = cli("verbalize --warehouse-seed 7 -s increasing -N 1");
  ASSERT_EQ(r.code, 0);
  auto l = lines(r.out);
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[0], expected);
  EXPECT_EQ(l[1].rfind("IG = ", 0), 0u);
}

// Seed 7: the informative first sentence carries as much information as the
// best grab or exit action.
TEST(CliVerbalize, InformativeMatchesMirrorModule) {
  warehouse::Scenario s = warehouse::generate_scenario(7);
  MirrorModel m = warehouse::build_scenario_model(s);
  Verbalization best = find_most_informative(m, 1);
  CliRun r = cli("verbalize --warehouse-seed 7 -s informative -N 1 --format json");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["actions"].size(), 1u);
  EXPECT_EQ(j["actions"][0]["sentence"], warehouse::templates(s).render(m.ground().action(best.actions[0])));
  double goal_best = 0.0;
  for (ActionId a : m.distinct_actions()) {
    const GroundAction& g = m.ground().action(a);
    if (g.name == "grab" || (g.name == "move" && s.find_cell(g.args[1])->kind == "door"))
      goal_best = std::max(goal_best, information_gain(m, Verbalization::of({a})).value());
  }
  EXPECT_GT(goal_best, 0.0);
  EXPECT_NEAR(j["information_gain"].get<double>(), goal_best, 1e-12);
}

TEST(CliVerbalize, ExitCodes) {
  EXPECT_EQ(cli("verbalize --warehouse-seed 7 -N 0").code, 4);
  EXPECT_EQ(cli("verbalize --warehouse-seed 7 -N 99").code, 4);

  auto d = scratch("plancomm_cli_codes");
  std::ofstream(d / "bad.pddl") << "(define (domain x) (:predicates (p)";
  EXPECT_EQ(cli("verbalize --domain " + (d / "bad.pddl").string() + " --problem " +
                (d / "bad.pddl").string() + " -N 1").code, 2);

  std::ofstream(d / "dom.pddl") << "(define (domain r) (:predicates (at ?x) (edge ?x ?y))"
                                   " (:action go :parameters (?x ?y) :precondition (and (at ?x) (edge ?x ?y))"
                                   " :effect (and (at ?y) (not (at ?x)))))";
  std::ofstream(d / "prob.pddl") << "(define (problem p) (:domain r) (:objects a b) (:init (at a))"
                                    " (:goal (at b)))";
  std::string args = " --domain " + (d / "dom.pddl").string() + " --problem " + (d / "prob.pddl").string();
  EXPECT_EQ(cli("verbalize" + args + " -N 1").code, 3);
  EXPECT_EQ(cli("plan" + args).code, 3);
  EXPECT_NE(cli("verbalize --warehouse-seed 7").code, 0);  // N is required
  fs::remove_all(d);
}

TEST(CliVerbalize, ConfigAndExport) {
  auto d = scratch("plancomm_cli_config");
  std::string dir = t::data_path("bench/blocks-world");
  nlohmann::json cfg = {{"domain", dir + "/domain.pddl"}, {"problem", dir + "/p01.pddl"},
                        {"goal_pool", dir + "/p01.hyps"}, {"J", 2}, {"seed", 3}};
  std::ofstream(d / "model.json") << cfg.dump();
  CliRun r = cli("verbalize --config " + (d / "model.json").string() + " -s decreasing -N 2 --out " +
              (d / "verb").string());
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out).size(), 3u);
  ASSERT_TRUE(fs::exists(d / "verb.json"));
  ASSERT_TRUE(fs::exists(d / "verb.txt"));
  auto j = nlohmann::json::parse(std::ifstream(d / "verb.json"));
  EXPECT_EQ(j["n"], 2);
  EXPECT_EQ(j["strategy"], "decreasing");
  fs::remove_all(d);
}

TEST(CliPlan, PrintsOptimalPlan) {
  std::string dir = t::data_path("bench/blocks-world");
  CliRun r = cli("plan --domain " + dir + "/domain.pddl --problem " + dir + "/p01.pddl -k 2");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("; plan 1 cost"), std::string::npos);
  EXPECT_NE(r.out.find("; plan 2 cost"), std::string::npos);
}

TEST(CliBench, WritesBothCsvs) {
  auto d = scratch("plancomm_cli_bench");
  CliRun r = cli("bench run --dataset " + t::data_path("bench") + " --domains logistics --instances 1 --seed 2 --out " +
              d.string());
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream m(d / "logistics_metrics.csv"), e(d / "logistics_entropy.csv");
  std::string header;
  std::getline(m, header);
  EXPECT_EQ(header, "x,e_gain_inc,e_gain_dec,e_gain_ent,g_dist_inc,g_dist_dec,g_dist_ent");
  std::getline(e, header);
  EXPECT_EQ(header.rfind("x,h_inc", 0), 0u);
  fs::remove_all(d);
}

TEST(CliWarehouseAndStudy, GenerateSimulateReplay) {
  auto d = scratch("plancomm_cli_study");
  ASSERT_EQ(cli("warehouse generate --seed 4 --out " + (d / "wh").string()).code, 0);
  EXPECT_TRUE(fs::exists(d / "wh" / "scenario.json"));
  EXPECT_TRUE(fs::exists(d / "wh" / "problem_g2.pddl"));

  CliRun sim = cli("study simulate --scenarios 6 --seed 1 --out " + (d / "study.csv").string());
  ASSERT_EQ(sim.code, 0);
  EXPECT_NE(sim.out.find("6 scenarios"), std::string::npos);
  std::ifstream csv(d / "study.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "fraction,strategy,hit_ratio,n");

  service::StudyService svc((d / "sessions").string(), 1);
  std::string id = svc.create_session("cli")["id"];
  svc.answer(id, R"({"scenario":1,"step":1,"answer":"dont_know","client_elapsed_ms":10})");
  CliRun replay = cli("study replay --log " + svc.log_path(id));
  ASSERT_EQ(replay.code, 0);
  EXPECT_EQ(replay.out, svc.results(id).dump() + "\n");
  fs::remove_all(d);
}
