#pragma once

// Warehouse scenarios: two colored rooms joined by a three-cell corridor,
// objects to collect, three exit doors and a recharge station. Also the
// simulated observer that predicts the robot's goal from verbalizations.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "plancomm/mirror.hpp"
#include "plancomm/pddl.hpp"
#include "plancomm/strategies.hpp"

namespace plancomm::warehouse {

struct Cell {
  std::string name;
  int x = 0;
  int y = 0;
  std::string kind;  // "room", "corridor", "door"
  std::string dest;  // phrase used by move sentences
};

struct Item {
  std::string name;
  std::string shape;  // circle, square, triangle
  std::string color;  // red, blue
  std::string cell;
};

struct Goal {
  std::string first;   // item names, sorted
  std::string second;
  std::string door;    // door cell name

  bool operator==(const Goal&) const = default;
  std::vector<pddl::GroundAtom> atoms() const;
};

struct Scenario {
  std::uint64_t seed = 0;
  std::string left_color;  // color of the left room; the right room has the other
  std::vector<Cell> cells;
  std::vector<std::pair<std::string, std::string>> adjacency;  // both directions listed
  std::vector<Item> items;
  std::string station;
  std::string robot_start;
  bool needs_recharge = false;
  std::vector<Goal> goals;  // 3 candidates, shuffled
  std::size_t true_goal = 0;

  const Cell* find_cell(const std::string& name) const;
  const Item* find_item(const std::string& name) const;
};

// Deterministic in the seed. Odd seeds need a recharge.
Scenario generate_scenario(std::uint64_t seed);

const std::string& domain_pddl();
pddl::Domain domain();
// Problem for candidate `goal_index` (the true goal by default).
pddl::Problem problem(const Scenario& s, std::optional<std::size_t> goal_index = std::nullopt);
std::string problem_pddl(const Scenario& s, std::optional<std::size_t> goal_index = std::nullopt);
TemplateTable templates(const Scenario& s);
std::string templates_text(const Scenario& s);
nlohmann::json to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);

// Three equi-probable goals, initial (charged) uncertain at 0.5.
MirrorModel build_scenario_model(const Scenario& s, const BuildOptions& options = {});

// Writes domain.pddl, problem_gN.pddl per candidate goal, scenario.json and
// templates.txt into `dir`.
void write_scenario_files(const Scenario& s, const std::string& dir);

// Goal whose posterior marginal strictly exceeds `threshold`; nullopt means
// "don't know" (including ties).
std::optional<std::size_t> observer_predict(const std::vector<double>& marginals,
                                            double threshold = 0.5);

struct ObserverState {
  const MirrorModel* model = nullptr;
  Verbalization heard;
  std::vector<double> marginals;

  explicit ObserverState(const MirrorModel& m);
  void hear(const Verbalization& o);
  std::optional<std::size_t> predict(double threshold = 0.5) const;
};

struct StudyConfig {
  std::size_t num_scenarios = 100;
  std::uint64_t seed = 0;  // scenario i uses seed + i
  std::vector<Strategy> strategies = {Strategy::Informative, Strategy::Increasing,
                                      Strategy::Decreasing};
  double threshold = 0.5;
};

struct BucketStat {
  double fraction = 0.0;
  std::size_t hits = 0;
  std::size_t predictions = 0;
  std::size_t dont_know = 0;

  double hit_ratio() const { return predictions ? double(hits) / predictions : 0.0; }
};

struct StrategyCurve {
  Strategy strategy;
  std::vector<BucketStat> buckets;          // fractions 0.0 .. 1.0
  std::vector<double> earliest_correct;     // one per scenario, in steps

  const BucketStat& at(double fraction) const;
  double mean_earliest() const;
};

struct StudyResult {
  std::vector<StrategyCurve> curves;
  double mean_plan_length = 0.0;
  std::size_t scenarios = 0;

  const StrategyCurve& curve(Strategy s) const;
};

// Bucket of step n out of d steps: floor(10 n / d) / 10, so 1.0 holds only
// the full plan.
double fraction_bucket(std::size_t n, std::size_t d);

// Smallest step from which every later answer is correct; steps + 1 when
// the last answer is wrong.
std::size_t earliest_stable_correct(const std::vector<bool>& correct);

StudyResult simulate_study(const StudyConfig& config);

// fraction, strategy, hit_ratio, n
void write_study_csv(std::ostream& out, const StudyResult& r);

// One-sided permutation test of mean(a) < mean(b). Returns 1.0 when every
// pooled sample is equal.
double significance_test(const std::vector<double>& a, const std::vector<double>& b,
                         std::size_t resamples = 100'000, std::uint64_t seed = 0);

}  // namespace plancomm::warehouse
