#pragma once

// JSON model configuration: which instance to load and how to build the
// observer-side hypothesis ensemble around it.
//
//   {
//     "domain": "domain.pddl",          paths relative to the config file
//     "problem": "p01.pddl",
//     "goal_pool": "p01.hyps",          optional; defaults to the problem goal
//     "robot_goal_index": 0,
//     "uncertain_atoms": ["(clear a)"], or "J": 4 (sampled from plan preconditions)
//     "theta": 0.5,                     number or one value per uncertain atom
//     "k": 1, "tau": 1.0, "seed": 0,
//     "templates": "templates.txt"      optional sentence templates
//   }

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "plancomm/mirror.hpp"
#include "plancomm/pddl.hpp"
#include "plancomm/strategies.hpp"

namespace plancomm {

struct ModelConfig {
  std::string domain;
  std::string problem;
  std::optional<std::string> goal_pool;
  std::size_t robot_goal_index = 0;
  std::optional<std::vector<pddl::GroundAtom>> uncertain_atoms;
  std::size_t uncertain_count = 0;  // J, used when uncertain_atoms is absent
  std::vector<double> theta = {0.5};  // a single value applies to every atom
  std::size_t k = 1;
  double tau = 1.0;
  std::uint64_t seed = 0;
  std::optional<std::string> templates;

  // Relative paths are resolved against `base_dir`.
  static ModelConfig from_json(const nlohmann::json& j, const std::string& base_dir = ".");
  static ModelConfig load(const std::string& path);
};

struct LoadedModel {
  pddl::Domain domain;
  pddl::Problem problem;
  std::vector<std::vector<pddl::GroundAtom>> goal_pool;
  std::vector<pddl::GroundAtom> uncertain;
  MirrorModel model;
  std::optional<TemplateTable> templates;
};

// The robot believes the problem's actual init; the observer is unsure of
// the uncertain atoms and of which pool goal the robot pursues.
LoadedModel build_from_config(const ModelConfig& config);

}  // namespace plancomm
