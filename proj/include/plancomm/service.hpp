#pragma once

// Study service: participant sessions over 12 warehouse scenarios, each
// verbalized with one of three strategies (balanced 4-4-4). Answers go to an
// append-only JSON-lines log per session and results are always recomputed
// from the logged records, so a replay of the file gives the same bytes.
//
// Log schema (one JSON object per line, file <out_dir>/<id>.jsonl):
//   {"type":"session","id","participant","seed","created_unix_ms",
//    "scenarios":[{"seed","strategy","true_goal","steps"}, ...]}
//   {"type":"answer","scenario","step","answer": 0|1|2|"dont_know",
//    "client_elapsed_ms","client_timestamp_ms"|null,"server_latency_ms",
//    "received_unix_ms"}
// "scenario" and "step" are 1-based; step n shows n sentences.

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "plancomm/strategies.hpp"

namespace httplib {
class Server;
}

namespace plancomm::service {

inline constexpr std::size_t kScenariosPerSession = 12;

struct ScenarioEntry {
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::Informative;
  std::size_t true_goal = 0;
  std::size_t steps = 0;  // distinct robot actions
};

struct AnswerRecord {
  std::size_t scenario = 0;  // 1-based
  std::size_t step = 0;
  std::optional<std::size_t> answer;  // nullopt: don't know
  double client_elapsed_ms = 0.0;
  std::optional<double> client_timestamp_ms;
  double server_latency_ms = 0.0;
  std::int64_t received_unix_ms = 0;
};

struct SessionRecord {
  std::string id;
  std::string participant;
  std::uint64_t seed = 0;
  std::int64_t created_unix_ms = 0;
  std::vector<ScenarioEntry> scenarios;
  std::vector<AnswerRecord> answers;
};

nlohmann::json to_json(const ScenarioEntry& e);
nlohmann::json session_header(const SessionRecord& s);
nlohmann::json to_json(const AnswerRecord& a);

// Scenario seeds, strategies and ground truth for a new session. Seeds are
// consecutive from an even base, so half of the scenarios need a recharge.
SessionRecord plan_session(std::string id, std::string participant, std::uint64_t seed);

// Reads a session log; throws ValidationError on malformed records.
SessionRecord read_session_log(const std::string& path);

// Per-strategy hit-ratio curves (don't-know counted as a miss, plus the
// ratio over definite answers only), earliest stable-correct steps of
// finished scenarios and pairwise permutation p-values.
nlohmann::json compute_results(const SessionRecord& s);
std::string replay_results(const std::string& log_path);

// Raised by the session API; `status` is the HTTP code to return.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& what) : std::runtime_error(what), status(status) {}
  int status;
};

class StudyService {
 public:
  // Reloads every session log already present in `out_dir`.
  StudyService(std::string out_dir, std::uint64_t seed);
  ~StudyService();

  nlohmann::json create_session(const std::string& participant);
  nlohmann::json step(const std::string& id);
  nlohmann::json answer(const std::string& id, const std::string& body);
  nlohmann::json results(const std::string& id);

  std::string log_path(const std::string& id) const;

 private:
  struct Live;
  Live& find(const std::string& id);

  std::string out_dir_;
  std::uint64_t seed_;
  std::size_t created_ = 0;
  std::mutex mutex_;
  std::map<std::string, std::unique_ptr<Live>> sessions_;
};

// Registers the REST endpoints on `server`.
void mount(httplib::Server& server, StudyService& service);

}  // namespace plancomm::service
