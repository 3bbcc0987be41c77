#pragma once

// Run service: accepts study submissions, executes them on a bounded worker
// pool in submission order, and persists every record in a directory per run
// next to the result files the CLI would emit for the same study.

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "inspsim/domain.hpp"

namespace httplib {
class Server;
}

namespace inspsim {

enum class RunState { Pending, Running, Done, Failed };
enum class StudyKind { Single, Comparison, Sweep };

std::string to_string(RunState state);
std::string to_string(StudyKind kind);
StudyKind study_kind_from_string(const std::string& text);

struct RunRecord {
  std::string id;
  StudyKind study = StudyKind::Single;
  Scenario scenario;
  std::vector<int> sizes;  // sweep only
  RunState state = RunState::Pending;
  std::string error;                // Failed only
  nlohmann::json results;           // summary document, Done only
  std::string table_file;           // primary CSV in the run directory, Done only
  std::string submitted_at;
  std::string started_at;
  std::string finished_at;
};

nlohmann::json record_to_json(const RunRecord& record);
RunRecord record_from_json(const nlohmann::json& doc);

// Rejected submission; `violations` lists {path, message} entries.
class SubmissionError : public std::runtime_error {
 public:
  SubmissionError(const std::string& what, nlohmann::json violations)
      : std::runtime_error(what), violations_(std::move(violations)) {}
  const nlohmann::json& violations() const { return violations_; }

 private:
  nlohmann::json violations_;
};

struct Preset {
  std::string name;
  StudyKind study = StudyKind::Comparison;
  std::vector<int> sizes;
  Scenario scenario;
};

std::vector<Preset> list_presets();

struct ServiceConfig {
  std::filesystem::path store = "inspsim-runs";
  int workers = 1;
};

class RunService {
 public:
  explicit RunService(ServiceConfig config);
  ~RunService();

  RunService(const RunService&) = delete;
  RunService& operator=(const RunService&) = delete;

  // Validates and enqueues; returns the new run id immediately. Body:
  // {"study": "single|comparison|sweep", "scenario": {...} | "preset": name,
  //  "sizes": "1..10" | [..]}.
  std::string submit(const nlohmann::json& body);

  std::optional<RunRecord> get_run(const std::string& id) const;
  std::vector<RunRecord> list_runs(const std::optional<RunState>& state = {},
                                   const std::optional<StudyKind>& study = {}) const;
  // Contents of the run's emitted table; nullopt if unknown or not Done.
  std::optional<std::string> results_csv(const std::string& id) const;

  // Blocks until every queued run has finished.
  void wait_idle();

  const std::filesystem::path& store() const { return config_.store; }

 private:
  void load();
  void persist(const RunRecord& record) const;
  void persist_index() const;
  void worker_loop(std::stop_token stop);
  void execute(const std::string& id);

  ServiceConfig config_;
  mutable std::mutex mutex_;
  std::condition_variable_any work_ready_;
  std::condition_variable idle_;
  std::map<std::string, RunRecord> records_;
  std::vector<std::string> order_;
  std::deque<std::string> queue_;
  int busy_ = 0;
  int next_id_ = 1;
  std::vector<std::jthread> workers_;
};

// Registers the wire API routes on `server`.
void mount_api(httplib::Server& server, RunService& service);

// Serves the API until the process stops; false if the socket cannot be bound.
bool serve_http(RunService& service, const std::string& host, int port);

}  // namespace inspsim
