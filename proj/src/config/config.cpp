#include "plancomm/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "plancomm/error.hpp"
#include "plancomm/ground.hpp"
#include "plancomm/planner.hpp"
#include "plancomm/rng.hpp"

namespace plancomm {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string resolve(const std::string& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? p : (fs::path(base) / path).lexically_normal().string();
}

template <typename T>
T field(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config field '") + key + "' has the wrong type");
  }
}

std::string path_field(const json& j, const char* key, const std::string& base) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string())
    throw ValidationError(std::string("config needs string field '") + key + "'");
  return resolve(base, it->get<std::string>());
}

}  // namespace

ModelConfig ModelConfig::from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ValidationError("model config must be a JSON object");
  ModelConfig c;
  c.domain = path_field(j, "domain", base_dir);
  c.problem = path_field(j, "problem", base_dir);
  if (j.contains("goal_pool")) c.goal_pool = path_field(j, "goal_pool", base_dir);
  if (j.contains("templates")) c.templates = path_field(j, "templates", base_dir);

  auto index = field<long long>(j, "robot_goal_index", 0);
  if (index < 0) throw ValidationError("robot_goal_index must be non-negative");
  c.robot_goal_index = static_cast<std::size_t>(index);

  if (j.contains("uncertain_atoms") && j.contains("J"))
    throw ValidationError("config gives both uncertain_atoms and J");
  if (j.contains("uncertain_atoms")) {
    std::vector<pddl::GroundAtom> atoms;
    for (const std::string& text : field<std::vector<std::string>>(j, "uncertain_atoms", {}))
      atoms.push_back(pddl::parse_ground_atom(text));
    c.uncertain_atoms = std::move(atoms);
  }
  auto count = field<long long>(j, "J", 0);
  if (count < 0) throw ValidationError("J must be non-negative");
  c.uncertain_count = static_cast<std::size_t>(count);

  if (j.contains("theta")) {
    if (j["theta"].is_array())
      c.theta = field<std::vector<double>>(j, "theta", {});
    else
      c.theta = {field<double>(j, "theta", 0.5)};
  }
  auto k = field<long long>(j, "k", 1);
  if (k < 1) throw ValidationError("k must be at least 1");
  c.k = static_cast<std::size_t>(k);
  c.tau = field<double>(j, "tau", 1.0);
  c.seed = field<std::uint64_t>(j, "seed", 0);
  return c;
}

ModelConfig ModelConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path + " is not valid JSON: " + e.what());
  }
  return from_json(j, fs::path(path).parent_path().string().empty()
                          ? "."
                          : fs::path(path).parent_path().string());
}

LoadedModel build_from_config(const ModelConfig& c) {
  LoadedModel out{pddl::parse_domain(pddl::read_file(c.domain)), {}, {}, {}, {}, {}};
  out.problem = pddl::parse_problem(pddl::read_file(c.problem), out.domain);
  if (c.goal_pool)
    out.goal_pool = pddl::parse_goal_pool(pddl::read_file(*c.goal_pool));
  else
    out.goal_pool = {out.problem.goal};
  if (out.goal_pool.empty()) throw ValidationError("goal pool is empty");
  if (c.robot_goal_index >= out.goal_pool.size())
    throw RangeError("robot_goal_index " + std::to_string(c.robot_goal_index) +
                     " outside a pool of " + std::to_string(out.goal_pool.size()));
  for (const auto& g : out.goal_pool)
    for (const auto& a : g) pddl::validate_ground_atom(a, out.domain, out.problem);

  pddl::Problem robot = out.problem;
  robot.goal = out.goal_pool[c.robot_goal_index];
  std::vector<pddl::GroundAtom> init = out.problem.init;
  std::sort(init.begin(), init.end());
  init.erase(std::unique(init.begin(), init.end()), init.end());

  if (c.uncertain_atoms) {
    out.uncertain = *c.uncertain_atoms;
    for (const auto& a : out.uncertain) pddl::validate_ground_atom(a, out.domain, out.problem);
  } else if (c.uncertain_count > 0) {
    // Draw from the initial atoms that some action of the robot plan needs.
    GroundOptions gopts;
    for (const auto& g : out.goal_pool)
      gopts.extra_atoms.insert(gopts.extra_atoms.end(), g.begin(), g.end());
    GroundInstance inst = ground(out.domain, robot, gopts);
    auto plan = plan_optimal(inst);
    if (!plan) throw UnsolvableError("robot instance is unsolvable");
    std::set<AtomId> needed;
    for (ActionId a : plan->actions)
      for (AtomId x : inst.model->action(a).pre)
        if (inst.init.contains(x)) needed.insert(x);
    std::vector<AtomId> candidates(needed.begin(), needed.end());
    Rng rng(c.seed);
    std::vector<std::size_t> picked =
        rng.sample(candidates.size(), std::min(c.uncertain_count, candidates.size()));
    std::sort(picked.begin(), picked.end());
    for (std::size_t i : picked) out.uncertain.push_back(inst.model->atom(candidates[i]));
  }
  std::sort(out.uncertain.begin(), out.uncertain.end());
  if (std::adjacent_find(out.uncertain.begin(), out.uncertain.end()) != out.uncertain.end())
    throw ValidationError("uncertain atoms repeat");

  std::vector<double> theta = c.theta;
  if (theta.size() == 1) theta.assign(out.uncertain.size(), c.theta[0]);
  if (theta.size() != out.uncertain.size())
    throw ValidationError("theta needs one value or one per uncertain atom");

  std::vector<pddl::GroundAtom> base;
  std::vector<bool> robot_choices;
  for (const auto& a : init)
    if (!std::binary_search(out.uncertain.begin(), out.uncertain.end(), a)) base.push_back(a);
  for (const auto& u : out.uncertain) robot_choices.push_back(std::binary_search(init.begin(), init.end(), u));

  BeliefPrior prior = BeliefPrior::uniform(base, out.uncertain, 0.5, out.goal_pool);
  prior.theta = theta;
  prior.validate();
  BuildOptions bopts;
  bopts.k = c.k;
  bopts.tau = c.tau;
  out.model = build_model(out.domain, robot, prior, c.robot_goal_index, robot_choices, bopts);
  if (c.templates) out.templates = TemplateTable::load(*c.templates);
  return out;
}

}  // namespace plancomm
