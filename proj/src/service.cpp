#include "inspsim/service.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <httplib.h>

#include "inspsim/emit.hpp"
#include "inspsim/experiment.hpp"
#include "inspsim/scenario_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace inspsim {

std::string to_string(RunState state) {
  switch (state) {
    case RunState::Pending: return "Pending";
    case RunState::Running: return "Running";
    case RunState::Done: return "Done";
    case RunState::Failed: return "Failed";
  }
  return "?";
}

namespace {

RunState run_state_from_string(const std::string& text) {
  if (text == "Pending") return RunState::Pending;
  if (text == "Running") return RunState::Running;
  if (text == "Done") return RunState::Done;
  if (text == "Failed") return RunState::Failed;
  throw std::invalid_argument("unknown run state '" + text + "'");
}

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

std::string to_string(StudyKind kind) {
  switch (kind) {
    case StudyKind::Single: return "single";
    case StudyKind::Comparison: return "comparison";
    case StudyKind::Sweep: return "sweep";
  }
  return "?";
}

StudyKind study_kind_from_string(const std::string& text) {
  if (text == "single") return StudyKind::Single;
  if (text == "comparison") return StudyKind::Comparison;
  if (text == "sweep") return StudyKind::Sweep;
  throw std::invalid_argument("unknown study kind '" + text + "'");
}

json record_to_json(const RunRecord& r) {
  json doc = {{"id", r.id},
              {"study", to_string(r.study)},
              {"state", to_string(r.state)},
              {"scenario", scenario_to_json(r.scenario)},
              {"sizes", r.sizes},
              {"submitted_at", r.submitted_at},
              {"started_at", r.started_at},
              {"finished_at", r.finished_at}};
  if (r.state == RunState::Done) {
    doc["results"] = r.results;
    doc["table_file"] = r.table_file;
  }
  if (r.state == RunState::Failed) doc["error"] = r.error;
  return doc;
}

RunRecord record_from_json(const json& doc) {
  RunRecord r;
  r.id = doc.at("id").get<std::string>();
  r.study = study_kind_from_string(doc.at("study").get<std::string>());
  r.state = run_state_from_string(doc.at("state").get<std::string>());
  r.scenario = scenario_from_json(doc.at("scenario"));
  r.sizes = doc.value("sizes", std::vector<int>{});
  r.submitted_at = doc.value("submitted_at", "");
  r.started_at = doc.value("started_at", "");
  r.finished_at = doc.value("finished_at", "");
  if (r.state == RunState::Done) {
    r.results = doc.value("results", json::object());
    r.table_file = doc.value("table_file", "");
  }
  if (r.state == RunState::Failed) r.error = doc.value("error", "");
  return r;
}

std::vector<Preset> list_presets() {
  const Scenario table1 = table1_scenario();
  std::vector<int> sizes(10);
  for (int i = 0; i < 10; ++i) sizes[static_cast<std::size_t>(i)] = i + 1;
  return {{"table1-policy-comparison", StudyKind::Comparison, {}, table1},
          {"fig3-team-sweep", StudyKind::Sweep, sizes, table1}};
}

RunService::RunService(ServiceConfig config) : config_(std::move(config)) {
  fs::create_directories(config_.store);
  load();
  const int n = std::max(1, config_.workers);
  for (int w = 0; w < n; ++w) {
    workers_.emplace_back([this](std::stop_token stop) { worker_loop(stop); });
  }
}

RunService::~RunService() {
  for (auto& w : workers_) w.request_stop();
  work_ready_.notify_all();
  workers_.clear();
}

void RunService::load() {
  const fs::path index = config_.store / "index.json";
  if (!fs::exists(index)) return;
  const json doc = json::parse(read_file(index));
  next_id_ = doc.value("next_id", 1);
  for (const auto& id : doc.value("runs", std::vector<std::string>{})) {
    RunRecord r = record_from_json(json::parse(read_file(config_.store / id / "record.json")));
    if (r.state == RunState::Running) {
      r.state = RunState::Failed;
      r.error = "interrupted by service restart";
      r.finished_at = now_utc();
      persist(r);
    } else if (r.state == RunState::Pending) {
      queue_.push_back(r.id);
    }
    order_.push_back(r.id);
    records_.emplace(r.id, std::move(r));
  }
}

void RunService::persist(const RunRecord& record) const {
  write_text_file(config_.store / record.id / "record.json", record_to_json(record).dump(2) + "\n");
}

void RunService::persist_index() const {
  write_text_file(config_.store / "index.json", json{{"next_id", next_id_}, {"runs", order_}}.dump(2) + "\n");
}

std::string RunService::submit(const json& body) {
  if (!body.is_object()) throw SubmissionError("request body must be a JSON object", json::array());

  RunRecord record;
  std::optional<Preset> preset;
  if (auto it = body.find("preset"); it != body.end()) {
    for (auto& p : list_presets()) {
      if (p.name == it->get<std::string>()) preset = p;
    }
    if (!preset) {
      throw SubmissionError("unknown preset", json::array({{{"path", "preset"}, {"message", "unknown preset"}}}));
    }
  }

  try {
    record.study = body.contains("study") ? study_kind_from_string(body.at("study").get<std::string>())
                   : preset              ? preset->study
                                         : StudyKind::Single;
    if (auto it = body.find("scenario"); it != body.end()) {
      record.scenario = scenario_from_json(*it);
    } else if (preset) {
      record.scenario = preset->scenario;
    } else {
      throw SubmissionError("missing scenario", json::array({{{"path", "scenario"}, {"message", "required"}}}));
    }
    if (record.study == StudyKind::Sweep) {
      if (auto it = body.find("sizes"); it != body.end()) {
        record.sizes = it->is_string() ? parse_sizes(it->get<std::string>()) : it->get<std::vector<int>>();
      } else {
        record.sizes = preset && !preset->sizes.empty() ? preset->sizes : parse_sizes("1..10");
      }
    }

    record.scenario = validate_scenario(std::move(record.scenario));
    for (int size : record.sizes) {
      Scenario probe = record.scenario;
      probe.policy.team_size = size;
      validate_scenario(std::move(probe));
    }
    if (record.study == StudyKind::Sweep && record.scenario.policy.kind != PolicyKind::All &&
        record.scenario.policy.kind != PolicyKind::DensityThreshold) {
      throw ValidationError("policy", "kind", "sweep needs policy all or density_threshold");
    }
  } catch (const ValidationError& e) {
    json violation = {{"path", e.field().empty() ? e.entity() : e.entity() + "." + e.field()}, {"message", e.what()}};
    throw SubmissionError(e.what(), json::array({violation}));
  } catch (const SubmissionError&) {
    throw;
  } catch (const std::exception& e) {
    throw SubmissionError(e.what(), json::array({{{"path", ""}, {"message", e.what()}}}));
  }

  std::lock_guard lock(mutex_);
  record.id = fmt::format("run-{:06d}", next_id_++);
  record.state = RunState::Pending;
  record.submitted_at = now_utc();
  persist(record);
  order_.push_back(record.id);
  persist_index();
  queue_.push_back(record.id);
  const std::string id = record.id;
  records_.emplace(id, std::move(record));
  work_ready_.notify_one();
  return id;
}

void RunService::worker_loop(std::stop_token stop) {
  while (true) {
    std::string id;
    {
      std::unique_lock lock(mutex_);
      if (!work_ready_.wait(lock, stop, [this] { return !queue_.empty(); })) return;
      id = queue_.front();
      queue_.pop_front();
      ++busy_;
    }
    execute(id);
    {
      std::lock_guard lock(mutex_);
      --busy_;
    }
    idle_.notify_all();
  }
}

void RunService::execute(const std::string& id) {
  RunRecord snapshot;
  {
    std::lock_guard lock(mutex_);
    auto& r = records_.at(id);
    r.state = RunState::Running;
    r.started_at = now_utc();
    persist(r);
    snapshot = r;
  }

  const fs::path dir = config_.store / id;
  json results;
  std::string table;
  std::string error;
  try {
    switch (snapshot.study) {
      case StudyKind::Single: {
        const auto set = run_replications(snapshot.scenario);
        table = emit_single(dir, set);
        results = summary_json(set);
        break;
      }
      case StudyKind::Comparison: {
        const auto cmp = policy_comparison(snapshot.scenario);
        table = emit_comparison(dir, cmp);
        results = summary_json(cmp);
        break;
      }
      case StudyKind::Sweep: {
        const auto curve = team_size_sweep(snapshot.scenario, snapshot.sizes);
        table = emit_sweep(dir, curve);
        results = summary_json(curve);
        break;
      }
    }
  } catch (const std::exception& e) {
    error = e.what();
  }

  std::lock_guard lock(mutex_);
  auto& r = records_.at(id);
  r.finished_at = now_utc();
  if (error.empty()) {
    r.state = RunState::Done;
    r.results = std::move(results);
    r.table_file = table;
  } else {
    r.state = RunState::Failed;
    r.error = error;
  }
  persist(r);
}

std::optional<RunRecord> RunService::get_run(const std::string& id) const {
  std::lock_guard lock(mutex_);
  if (auto it = records_.find(id); it != records_.end()) return it->second;
  return std::nullopt;
}

std::vector<RunRecord> RunService::list_runs(const std::optional<RunState>& state,
                                             const std::optional<StudyKind>& study) const {
  std::lock_guard lock(mutex_);
  std::vector<RunRecord> out;
  for (const auto& id : order_) {
    const auto& r = records_.at(id);
    if (state && r.state != *state) continue;
    if (study && r.study != *study) continue;
    out.push_back(r);
  }
  return out;
}

std::optional<std::string> RunService::results_csv(const std::string& id) const {
  std::string file;
  {
    std::lock_guard lock(mutex_);
    auto it = records_.find(id);
    if (it == records_.end() || it->second.state != RunState::Done) return std::nullopt;
    file = it->second.table_file;
  }
  return read_file(config_.store / id / file);
}

void RunService::wait_idle() {
  std::unique_lock lock(mutex_);
  idle_.wait(lock, [this] { return queue_.empty() && busy_ == 0; });
}

void mount_api(httplib::Server& server, RunService& service) {
  auto send_json = [](httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(body.dump(2), "application/json");
  };

  server.Post("/api/runs", [&service, send_json](const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::parse_error& e) {
      send_json(res, 400, {{"error", "malformed JSON"}, {"violations", json::array({{{"path", ""}, {"message", e.what()}}})}});
      return;
    }
    try {
      const auto id = service.submit(body);
      send_json(res, 202, {{"id", id}});
    } catch (const SubmissionError& e) {
      send_json(res, 400, {{"error", e.what()}, {"violations", e.violations()}});
    }
  });

  server.Get("/api/runs", [&service, send_json](const httplib::Request& req, httplib::Response& res) {
    std::optional<RunState> state;
    std::optional<StudyKind> study;
    try {
      if (req.has_param("state")) state = run_state_from_string(req.get_param_value("state"));
      if (req.has_param("study")) study = study_kind_from_string(req.get_param_value("study"));
    } catch (const std::exception& e) {
      send_json(res, 400, {{"error", e.what()}});
      return;
    }
    json list = json::array();
    for (const auto& r : service.list_runs(state, study)) {
      list.push_back({{"id", r.id},
                      {"study", to_string(r.study)},
                      {"state", to_string(r.state)},
                      {"submitted_at", r.submitted_at},
                      {"finished_at", r.finished_at}});
    }
    send_json(res, 200, list);
  });

  server.Get(R"(/api/runs/([A-Za-z0-9_-]+)/results\.csv)",
             [&service, send_json](const httplib::Request& req, httplib::Response& res) {
               const std::string id = req.matches[1];
               const auto record = service.get_run(id);
               if (!record) return send_json(res, 404, {{"error", "run not found"}, {"id", id}});
               const auto csv = service.results_csv(id);
               if (!csv) return send_json(res, 409, {{"error", "run has no results"}, {"state", to_string(record->state)}});
               res.set_header("Access-Control-Allow-Origin", "*");
               res.set_content(*csv, "text/csv");
             });

  server.Get(R"(/api/runs/([A-Za-z0-9_-]+))", [&service, send_json](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (auto record = service.get_run(id)) return send_json(res, 200, record_to_json(*record));
    send_json(res, 404, {{"error", "run not found"}, {"id", id}});
  });

  server.Get("/api/presets", [send_json](const httplib::Request&, httplib::Response& res) {
    json list = json::array();
    for (const auto& p : list_presets()) {
      list.push_back({{"name", p.name}, {"study", to_string(p.study)}, {"sizes", p.sizes}, {"scenario", scenario_to_json(p.scenario)}});
    }
    send_json(res, 200, list);
  });

  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

bool serve_http(RunService& service, const std::string& host, int port) {
  httplib::Server server;
  mount_api(server, service);
  return server.listen(host, port);
}

}  // namespace inspsim
