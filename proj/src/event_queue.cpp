#include "inspsim/event_queue.hpp"

#include <string>

namespace inspsim {

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::TaskReady: return "TaskReady";
    case EventKind::TaskComplete: return "TaskComplete";
    case EventKind::PersonReleased: return "PersonReleased";
    case EventKind::ItemRouted: return "ItemRouted";
    case EventKind::SimulationEnd: return "SimulationEnd";
  }
  return "?";
}

void EventQueue::schedule(Event event) {
  if (!(event.time >= clock_)) {
    throw ModelFault("event scheduled in the past: t=" + std::to_string(event.time) +
                     " < clock=" + std::to_string(clock_));
  }
  event.seq = next_seq_++;
  heap_.push(event);
}

Event EventQueue::pop() {
  if (heap_.empty()) throw ModelFault("pop from empty event queue");
  Event event = heap_.top();
  heap_.pop();
  clock_ = event.time;
  return event;
}

}  // namespace inspsim
