#include "plancomm/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "plancomm/error.hpp"
#include "plancomm/rng.hpp"
#include "plancomm/warehouse.hpp"

namespace plancomm::service {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr Strategy kStudyStrategies[] = {Strategy::Informative, Strategy::Decreasing,
                                         Strategy::Increasing};

std::int64_t unix_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string item_phrase(const warehouse::Item& i) { return "the " + i.color + " " + i.shape; }

std::string goal_label(const warehouse::Scenario& s, const warehouse::Goal& g) {
  return "Collect " + item_phrase(*s.find_item(g.first)) + " and " +
         item_phrase(*s.find_item(g.second)) + ", then " + s.find_cell(g.door)->dest + ".";
}

json map_json(const warehouse::Scenario& s) {
  json m;
  int w = 0, h = 0;
  json cells = json::array(), doors = json::array(), objects = json::array();
  for (const auto& c : s.cells) {
    w = std::max(w, c.x + 1);
    h = std::max(h, c.y + 1);
    cells.push_back({{"name", c.name}, {"x", c.x}, {"y", c.y}, {"kind", c.kind}});
    if (c.kind == "door") doors.push_back({{"name", c.name}, {"x", c.x}, {"y", c.y}});
  }
  for (const auto& i : s.items) {
    const auto* c = s.find_cell(i.cell);
    objects.push_back({{"name", i.name}, {"shape", i.shape}, {"color", i.color}, {"x", c->x}, {"y", c->y}});
  }
  const auto* st = s.find_cell(s.station);
  const auto* r = s.find_cell(s.robot_start);
  m["width"] = w;
  m["height"] = h;
  m["cells"] = cells;
  m["doors"] = doors;
  m["objects"] = objects;
  m["station"] = {{"x", st->x}, {"y", st->y}};
  m["robot"] = {{"x", r->x}, {"y", r->y}};
  return m;
}

std::optional<std::size_t> parse_answer_value(const json& v) {
  if (v.is_string() && v.get<std::string>() == "dont_know") return std::nullopt;
  if (v.is_number_integer()) {
    auto x = v.get<long long>();
    if (x >= 0 && x < 3) return static_cast<std::size_t>(x);
  }
  throw ValidationError("answer must be 0, 1, 2 or \"dont_know\"");
}

std::size_t positive_index(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer() || it->get<long long>() < 1)
    throw ValidationError(std::string("'") + key + "' must be a positive integer");
  return static_cast<std::size_t>(it->get<long long>());
}

AnswerRecord answer_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("record must be an object");
  AnswerRecord a;
  a.scenario = positive_index(j, "scenario");
  a.step = positive_index(j, "step");
  if (!j.contains("answer")) throw ValidationError("missing 'answer'");
  a.answer = parse_answer_value(j["answer"]);
  auto e = j.find("client_elapsed_ms");
  if (e == j.end() || !e->is_number() || e->get<double>() < 0)
    throw ValidationError("'client_elapsed_ms' must be a non-negative number");
  a.client_elapsed_ms = e->get<double>();
  auto t = j.find("client_timestamp_ms");
  if (t != j.end() && !t->is_null()) {
    if (!t->is_number()) throw ValidationError("'client_timestamp_ms' must be a number");
    a.client_timestamp_ms = t->get<double>();
  }
  return a;
}

// Position after `answers`: 0-based scenario, 1-based step.
std::pair<std::size_t, std::size_t> position(const SessionRecord& s) {
  std::size_t sc = 0, step = 1;
  for (std::size_t i = 0; i < s.answers.size() && sc < s.scenarios.size(); ++i) {
    if (step < s.scenarios[sc].steps) {
      ++step;
    } else {
      ++sc;
      step = 1;
    }
  }
  return {sc, step};
}

}  // namespace

json to_json(const ScenarioEntry& e) {
  return {{"seed", e.seed}, {"strategy", std::string(to_string(e.strategy))},
          {"true_goal", e.true_goal}, {"steps", e.steps}};
}

json session_header(const SessionRecord& s) {
  json sc = json::array();
  for (const auto& e : s.scenarios) sc.push_back(to_json(e));
  return {{"type", "session"},        {"id", s.id},   {"participant", s.participant},
          {"seed", s.seed},           {"created_unix_ms", s.created_unix_ms},
          {"scenarios", sc}};
}

json to_json(const AnswerRecord& a) {
  json j{{"type", "answer"}, {"scenario", a.scenario}, {"step", a.step}};
  j["answer"] = a.answer ? json(*a.answer) : json("dont_know");
  j["client_elapsed_ms"] = a.client_elapsed_ms;
  j["client_timestamp_ms"] = a.client_timestamp_ms ? json(*a.client_timestamp_ms) : json(nullptr);
  j["server_latency_ms"] = a.server_latency_ms;
  j["received_unix_ms"] = a.received_unix_ms;
  return j;
}

SessionRecord plan_session(std::string id, std::string participant, std::uint64_t seed) {
  SessionRecord s{std::move(id), std::move(participant), seed, unix_ms(), {}, {}};
  std::vector<Strategy> strategies;
  for (Strategy st : kStudyStrategies) strategies.insert(strategies.end(), kScenariosPerSession / 3, st);
  Rng rng(derive_seed(seed, "strategies"));
  rng.shuffle(strategies);
  const std::uint64_t base = derive_seed(seed, "scenarios") & 0xfffffffffffeULL;
  for (std::size_t i = 0; i < kScenariosPerSession; ++i) {
    warehouse::Scenario sc = warehouse::generate_scenario(base + i);
    MirrorModel m = warehouse::build_scenario_model(sc);
    s.scenarios.push_back({base + i, strategies[i], sc.true_goal, m.distinct_actions().size()});
  }
  return s;
}

SessionRecord read_session_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open session log " + path);
  SessionRecord s;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("type"))
      throw ValidationError(path + ":" + std::to_string(lineno) + ": malformed record");
    try {
      if (j["type"] == "session") {
        if (header) throw ValidationError("second session header");
        header = true;
        s.id = j.at("id").get<std::string>();
        s.participant = j.at("participant").get<std::string>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.created_unix_ms = j.at("created_unix_ms").get<std::int64_t>();
        for (const json& e : j.at("scenarios")) {
          auto st = parse_strategy(e.at("strategy").get<std::string>());
          if (!st) throw ValidationError("unknown strategy");
          s.scenarios.push_back({e.at("seed").get<std::uint64_t>(), *st,
                                 e.at("true_goal").get<std::size_t>(), e.at("steps").get<std::size_t>()});
        }
      } else if (j["type"] == "answer") {
        if (!header) throw ValidationError("answer before session header");
        AnswerRecord a = answer_from_json(j);
        a.server_latency_ms = j.at("server_latency_ms").get<double>();
        a.received_unix_ms = j.at("received_unix_ms").get<std::int64_t>();
        s.answers.push_back(a);
      } else {
        throw ValidationError("unknown record type");
      }
    } catch (const json::exception& e) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header) throw ValidationError(path + ": no session header");
  return s;
}

json compute_results(const SessionRecord& s) {
  struct Acc {
    std::vector<warehouse::BucketStat> buckets;
    std::vector<double> earliest;
    std::size_t scenarios = 0;
  };
  std::map<Strategy, Acc> acc;
  for (Strategy st : kStudyStrategies)
    for (int b = 0; b <= 10; ++b) acc[st].buckets.push_back({b / 10.0, 0, 0, 0});

  std::vector<std::vector<bool>> correct(s.scenarios.size());
  for (const AnswerRecord& a : s.answers) {
    if (a.scenario == 0 || a.scenario > s.scenarios.size()) continue;
    const ScenarioEntry& e = s.scenarios[a.scenario - 1];
    bool hit = a.answer && *a.answer == e.true_goal;
    auto& b = acc[e.strategy].buckets.at(static_cast<std::size_t>(warehouse::fraction_bucket(a.step, e.steps) * 10 + 0.5));
    b.predictions++;
    b.hits += hit;
    b.dont_know += !a.answer;
    correct[a.scenario - 1].push_back(hit);
  }
  std::size_t finished = 0;
  for (std::size_t i = 0; i < s.scenarios.size(); ++i) {
    Acc& a = acc[s.scenarios[i].strategy];
    a.scenarios++;
    if (correct[i].size() == s.scenarios[i].steps) {
      ++finished;
      a.earliest.push_back(static_cast<double>(warehouse::earliest_stable_correct(correct[i])));
    }
  }

  json out;
  out["session"] = s.id;
  out["participant"] = s.participant;
  out["scenario_count"] = s.scenarios.size();
  out["scenarios_finished"] = finished;
  out["answers"] = s.answers.size();
  out["complete"] = finished == s.scenarios.size();
  json strategies = json::object();
  for (Strategy st : kStudyStrategies) {
    const Acc& a = acc[st];
    json buckets = json::array();
    for (const auto& b : a.buckets) {
      std::size_t definite = b.predictions - b.dont_know;
      char frac[8];
      std::snprintf(frac, sizeof frac, "%.1f", b.fraction);
      buckets.push_back({{"fraction", frac},
                         {"hits", b.hits},
                         {"predictions", b.predictions},
                         {"dont_know", b.dont_know},
                         {"hit_ratio", b.predictions ? json(b.hit_ratio()) : json(nullptr)},
                         {"hit_ratio_excluding_dont_know",
                          definite ? json(double(b.hits) / definite) : json(nullptr)}});
    }
    double mean = 0.0;
    for (double v : a.earliest) mean += v;
    strategies[std::string(to_string(st))] = {
        {"scenarios", a.scenarios},
        {"buckets", buckets},
        {"earliest_correct", a.earliest},
        {"mean_earliest_correct", a.earliest.empty() ? json(nullptr) : json(mean / a.earliest.size())}};
  }
  out["strategies"] = strategies;

  // One-sided: the first strategy of each pair reaches a stable answer sooner.
  auto p = [&](Strategy a, Strategy b) -> json {
    const auto& x = acc[a].earliest;
    const auto& y = acc[b].earliest;
    if (x.size() < 2 || y.size() < 2) return nullptr;
    return warehouse::significance_test(x, y, 100'000, s.seed);
  };
  out["p_values"] = {
      {"informative_vs_increasing", p(Strategy::Informative, Strategy::Increasing)},
      {"informative_vs_decreasing", p(Strategy::Informative, Strategy::Decreasing)},
      {"decreasing_vs_increasing", p(Strategy::Decreasing, Strategy::Increasing)}};
  return out;
}

std::string replay_results(const std::string& log_path) {
  return compute_results(read_session_log(log_path)).dump();
}

struct StudyService::Live {
  SessionRecord record;
  std::size_t scenario = 0;  // 0-based; == count when done
  std::size_t step = 1;
  Clock::time_point started = Clock::now();
  bool fetched = false;

  // Built on demand for the current scenario.
  std::optional<std::size_t> cached_for;
  std::optional<warehouse::Scenario> sc;
  std::optional<MirrorModel> model;
  std::optional<TemplateTable> templates;

  bool done() const { return scenario >= record.scenarios.size(); }

  void load_current() {
    if (cached_for == scenario) return;
    sc = warehouse::generate_scenario(record.scenarios[scenario].seed);
    model = warehouse::build_scenario_model(*sc);
    templates = warehouse::templates(*sc);
    cached_for = scenario;
  }
};

StudyService::StudyService(std::string out_dir, std::uint64_t seed)
    : out_dir_(std::move(out_dir)), seed_(seed) {
  fs::create_directories(out_dir_);
  std::vector<fs::path> logs;
  for (const auto& e : fs::directory_iterator(out_dir_))
    if (e.is_regular_file() && e.path().extension() == ".jsonl") logs.push_back(e.path());
  std::sort(logs.begin(), logs.end());
  for (const auto& p : logs) {
    auto live = std::make_unique<Live>();
    live->record = read_session_log(p.string());
    std::tie(live->scenario, live->step) = position(live->record);
    std::string id = live->record.id;
    sessions_.emplace(id, std::move(live));
  }
  created_ = sessions_.size();
}

StudyService::~StudyService() = default;

std::string StudyService::log_path(const std::string& id) const {
  return (fs::path(out_dir_) / (id + ".jsonl")).string();
}

StudyService::Live& StudyService::find(const std::string& id) {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "unknown session " + id);
  return *it->second;
}

json StudyService::create_session(const std::string& participant) {
  std::lock_guard lock(mutex_);
  std::uint64_t sseed;
  std::string id;
  do {
    sseed = derive_seed(seed_, "session/" + std::to_string(created_++));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, sseed);
    id = buf;
  } while (sessions_.count(id));
  auto live = std::make_unique<Live>();
  live->record = plan_session(id, participant, sseed);
  std::ofstream out(log_path(id), std::ios::app);
  out << session_header(live->record).dump() << '\n';
  out.flush();
  if (!out) throw ServiceError(500, "cannot write session log");
  sessions_.emplace(id, std::move(live));
  return {{"id", id}, {"scenario_count", kScenariosPerSession}};
}

json StudyService::step(const std::string& id) {
  std::lock_guard lock(mutex_);
  Live& s = find(id);
  if (s.done()) return {{"session", id}, {"done", true}, {"scenario_count", s.record.scenarios.size()}};
  s.load_current();
  if (!s.fetched) {
    s.fetched = true;
    s.started = Clock::now();
  }
  json options = json::array();
  for (std::size_t g = 0; g < s.sc->goals.size(); ++g)
    options.push_back({{"value", g}, {"label", goal_label(*s.sc, s.sc->goals[g])}});
  options.push_back({{"value", "dont_know"}, {"label", "I don't know"}});
  const ScenarioEntry& e = s.record.scenarios[s.scenario];
  Verbalization o = select(e.strategy, *s.model, s.step);
  return {{"session", id},
          {"done", false},
          {"scenario", s.scenario + 1},
          {"scenario_count", s.record.scenarios.size()},
          {"step", s.step},
          {"steps", e.steps},
          {"map", map_json(*s.sc)},
          {"sentences", render(o, s.model->ground(), *s.templates)},
          {"options", options}};
}

json StudyService::answer(const std::string& id, const std::string& body) {
  std::lock_guard lock(mutex_);
  Live& s = find(id);
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw ServiceError(400, "answer body is not JSON");
  AnswerRecord a;
  try {
    a = answer_from_json(j);
  } catch (const ValidationError& e) {
    throw ServiceError(400, e.what());
  }
  if (s.done()) throw ServiceError(409, "session already complete");
  if (a.scenario != s.scenario + 1 || a.step != s.step)
    throw ServiceError(409, "expected scenario " + std::to_string(s.scenario + 1) + " step " +
                                std::to_string(s.step));
  auto now = Clock::now();
  a.server_latency_ms = std::chrono::duration<double, std::milli>(now - s.started).count();
  a.received_unix_ms = unix_ms();
  std::ofstream out(log_path(id), std::ios::app);
  out << to_json(a).dump() << '\n';
  out.flush();
  if (!out) throw ServiceError(500, "cannot write session log");
  s.record.answers.push_back(a);
  std::tie(s.scenario, s.step) = position(s.record);
  s.fetched = false;
  s.started = now;
  json r{{"accepted", true}, {"done", s.done()}};
  if (!s.done()) r["next"] = {{"scenario", s.scenario + 1}, {"step", s.step}};
  return r;
}

json StudyService::results(const std::string& id) {
  std::lock_guard lock(mutex_);
  return compute_results(find(id).record);
}

void mount(httplib::Server& server, StudyService& service) {
  auto wrap = [](auto fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      int status = 200;
      json body;
      try {
        body = fn(req, status);
      } catch (const ServiceError& e) {
        status = e.status;
        body = {{"error", e.what()}};
      } catch (const std::exception& e) {
        status = 500;
        body = {{"error", e.what()}};
      }
      res.status = status;
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_content(body.dump(), "application/json");
    };
  };
  server.Post("/sessions", wrap([&service](const httplib::Request& req, int& status) {
                std::string participant;
                if (!req.body.empty()) {
                  json j = json::parse(req.body, nullptr, false);
                  if (j.is_discarded() || !j.is_object())
                    throw ServiceError(400, "session body must be a JSON object");
                  if (j.contains("participant")) {
                    if (!j["participant"].is_string())
                      throw ServiceError(400, "'participant' must be a string");
                    participant = j["participant"].get<std::string>();
                  }
                }
                status = 201;
                return service.create_session(participant);
              }));
  server.Get(R"(/sessions/([^/]+)/step)", wrap([&service](const httplib::Request& req, int&) {
               return service.step(req.matches[1]);
             }));
  server.Post(R"(/sessions/([^/]+)/answer)", wrap([&service](const httplib::Request& req, int&) {
                return service.answer(req.matches[1], req.body);
              }));
  server.Get(R"(/sessions/([^/]+)/results)", wrap([&service](const httplib::Request& req, int&) {
               return service.results(req.matches[1]);
             }));
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.status = 204;
  });
}

}  // namespace plancomm::service
