#pragma once

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

namespace inspsim {

enum class EventKind { TaskReady, TaskComplete, PersonReleased, ItemRouted, SimulationEnd };

const char* to_string(EventKind kind);

struct Event {
  double time = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::SimulationEnd;
  int item = -1;    // index into the run's item table
  int person = -1;  // index into the run's staff, for PersonReleased
  int unit = -1;    // compound unit id, for TaskComplete
  int activity = -1;
};

// Thrown when the model asks for something the event kernel forbids, such as
// scheduling into the past. These indicate bugs in the model, not bad input.
class ModelFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Future event list ordered by (time, seq). seq is assigned on insertion, so
// events at equal times pop in the order they were scheduled.
class EventQueue {
 public:
  void schedule(Event event);

  Event pop();
  const Event& top() const { return heap_.top(); }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  double clock() const { return clock_; }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
  double clock_ = 0.0;
};

}  // namespace inspsim
