#include "plancomm/warehouse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>

#include "plancomm/error.hpp"
#include "plancomm/rng.hpp"

namespace plancomm::warehouse {

namespace {

const char* kDomain = R"((define (domain warehouse)
  (:requirements :strips :typing)
  (:types cell item)
  (:predicates (robot-at ?c - cell)
               (adjacent ?from - cell ?to - cell)
               (item-at ?o - item ?c - cell)
               (holding ?o - item)
               (station ?c - cell)
               (charged))
  (:action move
    :parameters (?from - cell ?to - cell)
    :precondition (and (robot-at ?from) (adjacent ?from ?to))
    :effect (and (robot-at ?to) (not (robot-at ?from))))
  (:action grab
    :parameters (?o - item ?c - cell)
    :precondition (and (robot-at ?c) (item-at ?o ?c) (charged))
    :effect (and (holding ?o) (not (item-at ?o ?c))))
  (:action recharge
    :parameters (?c - cell)
    :precondition (and (robot-at ?c) (station ?c))
    :effect (charged)))
)";

const char* kShapes[] = {"circle", "square", "triangle"};

std::string cell_name(int x, int y) { return "c" + std::to_string(x) + std::to_string(y); }

std::string other(const std::string& color) { return color == "red" ? "blue" : "red"; }

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

// Fixed geometry: rooms at x 0..1 and 5..6 (rows 0..1), corridor along row 1.
void build_layout(Scenario& s) {
  const std::string right_color = other(s.left_color);
  auto room = [&](int x0, const std::string& color, int entrance_x) {
    const char* corner[2][2] = {{"top-left", "bottom-left"}, {"top-right", "bottom-right"}};
    for (int y = 0; y < 2; ++y)
      for (int dx = 0; dx < 2; ++dx) {
        int x = x0 + dx;
        std::string dest = x == entrance_x && y == 1
                               ? "enter the " + color + " warehouse"
                               : std::string("move to the ") + corner[dx][y] + " corner of the " +
                                     color + " warehouse";
        s.cells.push_back({cell_name(x, y), x, y, "room", dest});
      }
  };
  room(0, s.left_color, 1);
  s.cells.push_back({cell_name(2, 1), 2, 1, "corridor", "navigate to the left corridor"});
  s.cells.push_back({cell_name(3, 1), 3, 1, "corridor", "navigate to the central corridor"});
  s.cells.push_back({cell_name(4, 1), 4, 1, "corridor", "navigate to the right corridor"});
  room(5, right_color, 5);
  s.cells.push_back({"door-top-left", 0, -1, "door", "exit from the top-left door"});
  s.cells.push_back({"door-top-right", 6, -1, "door", "exit from the top-right door"});
  s.cells.push_back({"door-bottom", 4, 2, "door", "exit from the bottom door"});

  auto link = [&](const std::string& a, const std::string& b) {
    s.adjacency.emplace_back(a, b);
    s.adjacency.emplace_back(b, a);
  };
  for (int x0 : {0, 5}) {
    link(cell_name(x0, 0), cell_name(x0 + 1, 0));
    link(cell_name(x0, 1), cell_name(x0 + 1, 1));
    link(cell_name(x0, 0), cell_name(x0, 1));
    link(cell_name(x0 + 1, 0), cell_name(x0 + 1, 1));
  }
  link(cell_name(1, 1), cell_name(2, 1));
  link(cell_name(2, 1), cell_name(3, 1));
  link(cell_name(3, 1), cell_name(4, 1));
  link(cell_name(4, 1), cell_name(5, 1));
  link("door-top-left", cell_name(0, 0));
  link("door-top-right", cell_name(6, 0));
  link("door-bottom", cell_name(4, 1));
  std::sort(s.adjacency.begin(), s.adjacency.end());
  s.station = cell_name(3, 1);
}

Goal make_goal(std::string a, std::string b, std::string door) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b), std::move(door)};
}

}  // namespace

std::vector<pddl::GroundAtom> Goal::atoms() const {
  return {{"holding", {first}}, {"holding", {second}}, {"robot-at", {door}}};
}

const Cell* Scenario::find_cell(const std::string& name) const {
  for (const Cell& c : cells)
    if (c.name == name) return &c;
  return nullptr;
}

const Item* Scenario::find_item(const std::string& name) const {
  for (const Item& i : items)
    if (i.name == name) return &i;
  return nullptr;
}

Scenario generate_scenario(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "warehouse"));
  Scenario s;
  s.seed = seed;
  s.needs_recharge = seed % 2 == 1;
  s.left_color = rng.below(2) ? "blue" : "red";
  build_layout(s);

  int counter = 0;
  for (int x0 : {0, 5}) {
    std::string color = x0 == 0 ? s.left_color : other(s.left_color);
    std::size_t count = 1 + rng.below(3);
    for (std::size_t slot : rng.sample(4, count)) {
      int x = x0 + static_cast<int>(slot % 2);
      int y = static_cast<int>(slot / 2);
      std::string shape = kShapes[rng.below(3)];
      s.items.push_back({"item" + std::to_string(++counter), shape, color, cell_name(x, y)});
    }
  }
  s.robot_start = cell_name(2 + static_cast<int>(rng.below(3)), 1);

  const std::vector<std::string> doors = {"door-top-left", "door-top-right", "door-bottom"};
  std::vector<std::size_t> pair = rng.sample(s.items.size(), 2);
  Goal truth = make_goal(s.items[pair[0]].name, s.items[pair[1]].name, doors[rng.below(3)]);

  std::vector<Goal> decoys;
  for (std::size_t i = 0; i < s.items.size(); ++i)
    for (std::size_t j = i + 1; j < s.items.size(); ++j)
      for (const std::string& d : doors) {
        Goal g = make_goal(s.items[i].name, s.items[j].name, d);
        if (!(g == truth)) decoys.push_back(g);
      }
  rng.shuffle(decoys);
  s.goals = {truth, decoys[0], decoys[1]};
  rng.shuffle(s.goals);
  s.true_goal = static_cast<std::size_t>(std::find(s.goals.begin(), s.goals.end(), truth) -
                                         s.goals.begin());
  return s;
}

const std::string& domain_pddl() {
  static const std::string text = kDomain;
  return text;
}

pddl::Domain domain() {
  static const pddl::Domain d = pddl::parse_domain(domain_pddl());
  return d;
}

pddl::Problem problem(const Scenario& s, std::optional<std::size_t> goal_index) {
  std::size_t g = goal_index.value_or(s.true_goal);
  if (g >= s.goals.size()) throw RangeError("goal index out of range");
  pddl::Problem p;
  p.name = "warehouse-" + std::to_string(s.seed) + "-g" + std::to_string(g);
  p.domain_name = "warehouse";
  for (const Cell& c : s.cells) p.objects.push_back({c.name, "cell"});
  for (const Item& i : s.items) p.objects.push_back({i.name, "item"});
  p.init.push_back({"robot-at", {s.robot_start}});
  for (const auto& [a, b] : s.adjacency) p.init.push_back({"adjacent", {a, b}});
  for (const Item& i : s.items) p.init.push_back({"item-at", {i.name, i.cell}});
  p.init.push_back({"station", {s.station}});
  if (!s.needs_recharge) p.init.push_back({"charged", {}});
  p.goal = s.goals[g].atoms();
  return p;
}

std::string problem_pddl(const Scenario& s, std::optional<std::size_t> goal_index) {
  return pddl::write_problem(problem(s, goal_index));
}

std::string templates_text(const Scenario& s) {
  std::string out =
      "move: I will {arg2.dest}.\n"
      "grab: I will grab a {color} {shape}.\n"
      "recharge: I will recharge at the recharge station.\n";
  for (const Cell& c : s.cells) out += "@" + c.name + ".dest: " + c.dest + "\n";
  for (const Item& i : s.items) {
    out += "@" + i.name + ".color: " + i.color + "\n";
    out += "@" + i.name + ".shape: " + i.shape + "\n";
  }
  return out;
}

TemplateTable templates(const Scenario& s) { return TemplateTable::parse(templates_text(s)); }

nlohmann::json to_json(const Scenario& s) {
  nlohmann::json j;
  j["seed"] = s.seed;
  j["left_color"] = s.left_color;
  j["right_color"] = other(s.left_color);
  j["cells"] = nlohmann::json::array();
  for (const Cell& c : s.cells)
    j["cells"].push_back({{"name", c.name}, {"x", c.x}, {"y", c.y}, {"kind", c.kind}, {"dest", c.dest}});
  j["adjacency"] = nlohmann::json::array();
  for (const auto& [a, b] : s.adjacency) j["adjacency"].push_back({a, b});
  j["items"] = nlohmann::json::array();
  for (const Item& i : s.items)
    j["items"].push_back({{"name", i.name}, {"shape", i.shape}, {"color", i.color}, {"cell", i.cell}});
  j["station"] = s.station;
  j["robot_start"] = s.robot_start;
  j["needs_recharge"] = s.needs_recharge;
  j["goals"] = nlohmann::json::array();
  for (const Goal& g : s.goals)
    j["goals"].push_back({{"items", {g.first, g.second}}, {"door", g.door}});
  j["true_goal"] = s.true_goal;
  return j;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  try {
    Scenario s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.left_color = j.at("left_color").get<std::string>();
    for (const auto& c : j.at("cells"))
      s.cells.push_back({c.at("name"), c.at("x"), c.at("y"), c.at("kind"), c.at("dest")});
    for (const auto& e : j.at("adjacency")) s.adjacency.emplace_back(e.at(0), e.at(1));
    for (const auto& i : j.at("items"))
      s.items.push_back({i.at("name"), i.at("shape"), i.at("color"), i.at("cell")});
    s.station = j.at("station").get<std::string>();
    s.robot_start = j.at("robot_start").get<std::string>();
    s.needs_recharge = j.at("needs_recharge").get<bool>();
    for (const auto& g : j.at("goals"))
      s.goals.push_back({g.at("items").at(0), g.at("items").at(1), g.at("door")});
    s.true_goal = j.at("true_goal").get<std::size_t>();
    if (s.true_goal >= s.goals.size()) throw ValidationError("scenario true_goal out of range");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed scenario JSON: ") + e.what());
  }
}

MirrorModel build_scenario_model(const Scenario& s, const BuildOptions& options) {
  pddl::Problem p = problem(s);
  const pddl::GroundAtom charged{"charged", {}};
  std::vector<pddl::GroundAtom> base;
  for (const auto& a : p.init)
    if (!(a == charged)) base.push_back(a);
  std::vector<std::vector<pddl::GroundAtom>> pool;
  for (const Goal& g : s.goals) pool.push_back(g.atoms());
  BeliefPrior prior = BeliefPrior::uniform(base, {charged}, 0.5, pool);
  return build_model(domain(), p, prior, s.true_goal, {!s.needs_recharge}, options);
}

void write_scenario_files(const Scenario& s, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_text(fs::path(dir) / "domain.pddl", domain_pddl());
  for (std::size_t g = 0; g < s.goals.size(); ++g)
    write_text(fs::path(dir) / ("problem_g" + std::to_string(g) + ".pddl"), problem_pddl(s, g));
  write_text(fs::path(dir) / "scenario.json", to_json(s).dump(2) + "\n");
  write_text(fs::path(dir) / "templates.txt", templates_text(s));
}

std::optional<std::size_t> observer_predict(const std::vector<double>& marginals,
                                            double threshold) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < marginals.size(); ++i)
    if (marginals[i] > threshold && (!best || marginals[i] > marginals[*best])) best = i;
  return best;
}

ObserverState::ObserverState(const MirrorModel& m)
    : model(&m), marginals(prior_joint(m).goal_marginals(m)) {}

void ObserverState::hear(const Verbalization& o) {
  heard = o;
  Posterior p = posterior(*model, o);
  if (p.all_eliminated())
    marginals.assign(model->goal_count(), 0.0);
  else
    marginals = p.goal_marginals(*model);
}

std::optional<std::size_t> ObserverState::predict(double threshold) const {
  return observer_predict(marginals, threshold);
}

const BucketStat& StrategyCurve::at(double fraction) const {
  for (const BucketStat& b : buckets)
    if (std::fabs(b.fraction - fraction) < 1e-9) return b;
  throw RangeError("no bucket at fraction " + std::to_string(fraction));
}

double StrategyCurve::mean_earliest() const {
  if (earliest_correct.empty()) return 0.0;
  return std::accumulate(earliest_correct.begin(), earliest_correct.end(), 0.0) /
         earliest_correct.size();
}

const StrategyCurve& StudyResult::curve(Strategy s) const {
  for (const StrategyCurve& c : curves)
    if (c.strategy == s) return c;
  throw RangeError("strategy not simulated: " + std::string(to_string(s)));
}

double fraction_bucket(std::size_t n, std::size_t d) {
  if (d == 0 || n == 0 || n > d) throw RangeError("step outside the scenario");
  return static_cast<double>(10 * n / d) / 10.0;
}

std::size_t earliest_stable_correct(const std::vector<bool>& correct) {
  std::size_t n = correct.size();
  while (n > 0 && correct[n - 1]) --n;
  return n + 1;
}

StudyResult simulate_study(const StudyConfig& config) {
  if (config.strategies.empty()) throw ValidationError("no strategies to simulate");
  StudyResult r;
  for (Strategy st : config.strategies) {
    StrategyCurve c{st, {}, {}};
    for (int b = 0; b <= 10; ++b) c.buckets.push_back({b / 10.0, 0, 0, 0});
    r.curves.push_back(std::move(c));
  }
  double total_len = 0.0;
  for (std::size_t i = 0; i < config.num_scenarios; ++i) {
    Scenario s = generate_scenario(config.seed + i);
    MirrorModel m = build_scenario_model(s);
    total_len += m.robot_plan().cost();
    const std::size_t d = m.distinct_actions().size();
    for (StrategyCurve& c : r.curves) {
      ObserverState obs(m);
      std::vector<bool> correct;
      for (std::size_t n = 1; n <= d; ++n) {
        obs.hear(select(c.strategy, m, n));
        auto guess = obs.predict(config.threshold);
        bool hit = guess && *guess == s.true_goal;
        correct.push_back(hit);
        BucketStat& b = c.buckets[10 * n / d];
        b.predictions++;
        b.hits += hit;
        b.dont_know += !guess;
      }
      c.earliest_correct.push_back(static_cast<double>(earliest_stable_correct(correct)));
    }
  }
  r.scenarios = config.num_scenarios;
  r.mean_plan_length = config.num_scenarios ? total_len / config.num_scenarios : 0.0;
  return r;
}

void write_study_csv(std::ostream& out, const StudyResult& r) {
  out << "fraction,strategy,hit_ratio,n\n";
  char buf[64];
  for (const StrategyCurve& c : r.curves)
    for (const BucketStat& b : c.buckets) {
      std::snprintf(buf, sizeof buf, "%.1f", b.fraction);
      out << buf << ',' << to_string(c.strategy) << ',';
      std::snprintf(buf, sizeof buf, "%.6f", b.hit_ratio());
      out << buf << ',' << b.predictions << '\n';
    }
}

double significance_test(const std::vector<double>& a, const std::vector<double>& b,
                         std::size_t resamples, std::uint64_t seed) {
  if (a.size() < 2 || b.size() < 2) throw RangeError("permutation test needs two samples per group");
  if (resamples == 0) throw RangeError("permutation test needs at least one resample");
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  if (std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled[0]; }))
    return 1.0;
  auto mean = [](auto first, auto last) {
    return std::accumulate(first, last, 0.0) / static_cast<double>(last - first);
  };
  const auto na = static_cast<std::ptrdiff_t>(a.size());
  const double observed = mean(b.begin(), b.end()) - mean(a.begin(), a.end());
  const double eps = 1e-12 * std::max(1.0, std::fabs(observed));
  Rng rng(seed);
  std::size_t extreme = 0;
  for (std::size_t r = 0; r < resamples; ++r) {
    rng.shuffle(pooled);
    double stat = mean(pooled.begin() + na, pooled.end()) - mean(pooled.begin(), pooled.begin() + na);
    if (stat >= observed - eps) ++extreme;
  }
  return static_cast<double>(extreme + 1) / static_cast<double>(resamples + 1);
}

}  // namespace plancomm::warehouse
