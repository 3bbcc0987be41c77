#pragma once

// Discrete-event kernel for one replication of a scenario.
//
// Routing: [design] -> coding -> [inspection -> rework] -> [test -> test rework] -> done.
// Design is a pure delay; inspection is taken when switched on and the policy
// selects the item; rework follows only when inspection found something.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "inspsim/domain.hpp"
#include "inspsim/event_queue.hpp"
#include "inspsim/staff_pool.hpp"

namespace inspsim {

class DeadlockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceRecord {
  double time = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::SimulationEnd;
  ItemId item_id;
  std::vector<PersonId> person_ids;
  std::string activity;
};

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);

struct RunOptions {
  bool trace = false;
};

class Simulator {
 public:
  // The scenario must already have passed validate_scenario.
  Simulator(const Scenario& scenario, int replication, RunOptions options = {});

  // Processes one event. Returns false once the simulation has ended; throws
  // DeadlockError if work remains but nothing is scheduled.
  bool step();
  void run_to_end();

  double clock() const { return queue_.clock(); }
  const Event& last_event() const { return last_event_; }
  std::size_t events_processed() const { return events_processed_; }
  bool finished() const { return finished_; }

  const StaffPool& pool() const { return pool_; }
  const std::vector<Item>& items() const { return items_; }
  const std::vector<Person>& persons() const { return persons_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }
  // Number of compound units each item currently belongs to.
  int active_units(int item) const { return active_units_.at(static_cast<std::size_t>(item)); }

  RunResult result() const;

 private:
  struct Outcome {
    double elapsed = 0.0;
    double effort = 0.0;
    int injected = 0;
    int found = 0;
  };

  struct PendingTask {
    int item = 0;
    Activity activity = Activity::Coding;
  };

  void handle(const Event& event);
  void on_item_routed(int item, double now);
  void on_task_ready(int item, Activity activity, double now);
  void on_task_complete(int unit, double now);
  void dispatch(double now);
  void start(int unit, double now);
  void route_to_test(int item, double now);
  void finish_item(int item, double now);
  void schedule(EventKind kind, double time, int item, int person = -1, int unit = -1, int activity = -1);
  void record(const Event& event);

  const Scenario& scenario_;
  const Calibration& calib_;
  int replication_;
  RunOptions options_;

  std::vector<Item> items_;
  std::vector<Person> persons_;
  std::vector<ItemLedger> ledgers_;
  std::vector<int> authors_;
  std::vector<std::optional<Activity>> last_done_;
  std::vector<int> active_units_;

  EventQueue queue_;
  StaffPool pool_;
  std::vector<CompoundUnit> units_;
  std::vector<Outcome> outcomes_;
  std::vector<PendingTask> pending_;  // indexed by staff request id

  double planned_coding_end_ = 0.0;
  double unstarted_coding_hours_ = 0.0;
  int items_done_ = 0;
  double end_time_ = 0.0;
  bool finished_ = false;
  bool end_scheduled_ = false;
  Event last_event_;
  std::size_t events_processed_ = 0;
  std::vector<TraceRecord> trace_;
};

RunResult run_simulation(const Scenario& scenario, int replication);

}  // namespace inspsim
