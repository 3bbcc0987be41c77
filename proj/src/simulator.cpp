#include "inspsim/simulator.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "inspsim/policy.hpp"
#include "inspsim/process.hpp"
#include "inspsim/rng.hpp"

namespace inspsim {

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "time,seq,kind,item_id,person_ids,activity\n";
  for (const auto& r : trace) {
    std::string persons;
    for (std::size_t i = 0; i < r.person_ids.size(); ++i) {
      if (i) persons += ';';
      persons += r.person_ids[i];
    }
    out << fmt::format("{:.6f},{},{},{},{},{}\n", r.time, r.seq, to_string(r.kind), r.item_id, persons, r.activity);
  }
}

Simulator::Simulator(const Scenario& scenario, int replication, RunOptions options)
    : scenario_(scenario),
      calib_(scenario.calibration),
      replication_(replication),
      options_(options),
      items_(scenario.items),
      persons_(scenario.persons),
      ledgers_(scenario.items.size()),
      authors_(scenario.items.size(), -1),
      last_done_(scenario.items.size()),
      active_units_(scenario.items.size(), 0),
      pool_(static_cast<int>(scenario.persons.size())) {
  const double staff = static_cast<double>(persons_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    auto& ledger = ledgers_[i];
    ledger.id = items_[i].id;
    ledger.size_loc = items_[i].size_loc;
    ledger.initial_latent = items_[i].latent_defects;
    unstarted_coding_hours_ += items_[i].size_loc * items_[i].complexity / calib_.nominal_coding_productivity;
  }
  planned_coding_end_ = unstarted_coding_hours_ / staff;

  for (std::size_t i = 0; i < items_.size(); ++i) {
    double release = 0.0;
    if (scenario_.switches.design_on) {
      auto rng = item_stream(scenario_.seed, replication_, i, StreamTag::Design);
      release = rng.sample(calib_.distribution_table.at(kDesignDelay));
    }
    schedule(EventKind::ItemRouted, release, static_cast<int>(i), -1, -1, static_cast<int>(Activity::Design));
  }
}

void Simulator::schedule(EventKind kind, double time, int item, int person, int unit, int activity) {
  Event e;
  e.time = time;
  e.kind = kind;
  e.item = item;
  e.person = person;
  e.unit = unit;
  e.activity = activity;
  queue_.schedule(e);
}

bool Simulator::step() {
  if (finished_) return false;
  if (queue_.empty()) {
    std::ostringstream msg;
    msg << "deadlock at t=" << clock() << ": " << (items_.size() - static_cast<std::size_t>(items_done_))
        << " item(s) unfinished, " << pool_.waiting_count() << " staff request(s) waiting, "
        << pool_.available_count() << " person(s) idle";
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (items_[i].phase != Phase::Done) msg << "; " << items_[i].id << " in " << to_string(items_[i].phase);
    }
    throw DeadlockError(msg.str());
  }
  const Event event = queue_.pop();
  last_event_ = event;
  ++events_processed_;
  handle(event);
  if (options_.trace) record(event);
  return !finished_;
}

void Simulator::run_to_end() {
  while (step()) {
  }
}

void Simulator::handle(const Event& event) {
  switch (event.kind) {
    case EventKind::ItemRouted: on_item_routed(event.item, event.time); break;
    case EventKind::TaskReady: on_task_ready(event.item, static_cast<Activity>(event.activity), event.time); break;
    case EventKind::TaskComplete: on_task_complete(event.unit, event.time); break;
    case EventKind::PersonReleased: dispatch(event.time); break;
    case EventKind::SimulationEnd:
      finished_ = true;
      end_time_ = event.time;
      break;
  }
}

void Simulator::on_item_routed(int i, double now) {
  auto& item = items_[static_cast<std::size_t>(i)];
  const auto last = last_done_[static_cast<std::size_t>(i)];
  if (!last) {
    schedule(EventKind::TaskReady, now, i, -1, -1, static_cast<int>(Activity::Coding));
    return;
  }
  switch (*last) {
    case Activity::Coding:
      if (scenario_.switches.inspection_on && select_for_inspection(item, scenario_.policy)) {
        item.phase = Phase::AwaitingInspection;
        schedule(EventKind::TaskReady, now, i, -1, -1, static_cast<int>(Activity::Inspection));
      } else {
        route_to_test(i, now);
      }
      break;
    case Activity::Inspection:
      if (item.found_in_inspection > 0) {
        item.phase = Phase::InRework;
        schedule(EventKind::TaskReady, now, i, -1, -1, static_cast<int>(Activity::Rework));
      } else {
        route_to_test(i, now);
      }
      break;
    case Activity::Rework: route_to_test(i, now); break;
    case Activity::Test:
      schedule(EventKind::TaskReady, now, i, -1, -1, static_cast<int>(Activity::TestRework));
      break;
    case Activity::TestRework:
    case Activity::Design: finish_item(i, now); break;
  }
}

void Simulator::route_to_test(int i, double now) {
  auto& item = items_[static_cast<std::size_t>(i)];
  ledgers_[static_cast<std::size_t>(i)].after_inspection = item.latent_defects;
  if (scenario_.switches.test_on && test_plan(item.latent_defects, item.size_loc, calib_).removed > 0) {
    item.phase = Phase::AwaitingTest;
    schedule(EventKind::TaskReady, now, i, -1, -1, static_cast<int>(Activity::Test));
  } else {
    finish_item(i, now);
  }
}

void Simulator::finish_item(int i, double now) {
  auto& item = items_[static_cast<std::size_t>(i)];
  auto& ledger = ledgers_[static_cast<std::size_t>(i)];
  item.phase = Phase::Done;
  item.completion_time = now;
  ledger.remaining = item.latent_defects;
  ledger.completion_time = now;
  ledger.effort_by_phase = item.effort_by_phase;
  if (++items_done_ == static_cast<int>(items_.size()) && !end_scheduled_) {
    end_scheduled_ = true;
    schedule(EventKind::SimulationEnd, now, -1);
  }
}

void Simulator::on_task_ready(int i, Activity activity, double now) {
  const auto idx = static_cast<std::size_t>(i);
  int request = 0;
  switch (activity) {
    case Activity::Coding:
    case Activity::Test: request = pool_.request(1, now); break;
    case Activity::Inspection:
      request = pool_.request(scenario_.policy.team_size, now, authors_[idx]);
      break;
    case Activity::Rework:
    case Activity::TestRework: request = pool_.request(1, now, std::nullopt, authors_[idx]); break;
    case Activity::Design: throw ModelFault("design is not a staffed activity");
  }
  if (static_cast<std::size_t>(request) != pending_.size()) throw ModelFault("staff request ids out of step");
  pending_.push_back({i, activity});
  dispatch(now);
}

void Simulator::dispatch(double now) {
  for (auto& grant : pool_.dispatch(now)) {
    const PendingTask task = pending_.at(static_cast<std::size_t>(grant.request));
    const int unit = static_cast<int>(units_.size());
    units_.push_back(batch(unit, task.item, grant.persons, task.activity, pool_));
    outcomes_.emplace_back();
    ++active_units_[static_cast<std::size_t>(task.item)];
    start(unit, now);
  }
}

void Simulator::start(int u, double now) {
  const auto& unit = units_[static_cast<std::size_t>(u)];
  const auto idx = static_cast<std::size_t>(unit.item());
  auto& item = items_[idx];
  auto& out = outcomes_[static_cast<std::size_t>(u)];
  const std::uint64_t seed = scenario_.seed;

  switch (unit.activity()) {
    case Activity::Coding: {
      const Person& coder = persons_[static_cast<std::size_t>(unit.persons().front())];
      authors_[idx] = unit.persons().front();
      item.phase = Phase::Coding;
      const double staff = static_cast<double>(persons_.size());
      PressureState pressure{std::max(0.0, planned_coding_end_ - now), unstarted_coding_hours_ / staff};
      unstarted_coding_hours_ -= item.size_loc * item.complexity / calib_.nominal_coding_productivity;
      auto fatigue = item_stream(seed, replication_, idx, StreamTag::CodingFatigue);
      auto noise = item_stream(seed, replication_, idx, StreamTag::CodingNoise);
      out.elapsed = coding_duration(item, coder, calib_, pressure, fatigue);
      out.effort = out.elapsed;
      out.injected = defects_injected(item, coder, calib_, pressure, noise);
      break;
    }
    case Activity::Inspection: {
      item.phase = Phase::InInspection;
      std::vector<Person> team;
      for (int p : unit.persons()) team.push_back(persons_[static_cast<std::size_t>(p)]);
      auto fatigue = item_stream(seed, replication_, idx, StreamTag::InspectionFatigue);
      auto detection = item_stream(seed, replication_, idx, StreamTag::Detection);
      const auto time = inspection_duration(item, team, calib_, fatigue);
      out.elapsed = time.elapsed;
      out.effort = time.effort;
      out.found = team_detection(item.latent_defects, team, calib_, detection);
      break;
    }
    case Activity::Rework: {
      item.phase = Phase::InRework;
      const Person& author = persons_[static_cast<std::size_t>(unit.persons().front())];
      auto rng = item_stream(seed, replication_, idx, StreamTag::Rework);
      const auto r = rework(item.found_in_inspection, author, calib_, rng);
      out.elapsed = out.effort = r.hours;
      out.injected = r.new_defects;
      break;
    }
    case Activity::Test: {
      item.phase = Phase::InTest;
      const auto plan = test_plan(item.latent_defects, item.size_loc, calib_);
      out.elapsed = out.effort = plan.hours;
      out.found = plan.removed;
      break;
    }
    case Activity::TestRework: {
      item.phase = Phase::InTest;
      const Person& author = persons_[static_cast<std::size_t>(unit.persons().front())];
      out.elapsed = out.effort = final_rework(item.found_in_test, author, calib_).hours;
      break;
    }
    case Activity::Design: throw ModelFault("design is not a staffed activity");
  }
  schedule(EventKind::TaskComplete, now + out.elapsed, unit.item(), -1, u, static_cast<int>(unit.activity()));
}

void Simulator::on_task_complete(int u, double now) {
  auto& unit = units_[static_cast<std::size_t>(u)];
  const auto idx = static_cast<std::size_t>(unit.item());
  auto& item = items_[idx];
  auto& ledger = ledgers_[idx];
  const Outcome& out = outcomes_[static_cast<std::size_t>(u)];

  switch (unit.activity()) {
    case Activity::Coding:
      item.latent_defects += out.injected;
      ledger.injected_coding += out.injected;
      learning_update(persons_[static_cast<std::size_t>(unit.persons().front())], Activity::Coding, item.size_loc);
      break;
    case Activity::Inspection:
      ledger.inspected = true;
      ledger.latent_at_inspection = item.latent_defects;
      item.found_in_inspection = out.found;
      item.latent_defects -= out.found;
      ledger.found_inspection = out.found;
      for (int p : unit.persons()) {
        learning_update(persons_[static_cast<std::size_t>(p)], Activity::Inspection, item.size_loc);
      }
      break;
    case Activity::Rework:
      item.latent_defects += out.injected;
      ledger.injected_rework += out.injected;
      break;
    case Activity::Test:
      item.found_in_test = out.found;
      item.latent_defects -= out.found;
      ledger.found_test = out.found;
      break;
    case Activity::TestRework:
    case Activity::Design: break;
  }
  item.effort_by_phase[unit.activity()] += out.effort;
  last_done_[idx] = unit.activity();
  --active_units_[idx];

  for (int p : unit.unbatch(pool_, now)) schedule(EventKind::PersonReleased, now, unit.item(), p, u);
  schedule(EventKind::ItemRouted, now, unit.item(), -1, u, static_cast<int>(unit.activity()));
}

void Simulator::record(const Event& e) {
  TraceRecord r;
  r.time = e.time;
  r.seq = e.seq;
  r.kind = e.kind;
  if (e.item >= 0) r.item_id = items_[static_cast<std::size_t>(e.item)].id;
  if (e.kind == EventKind::PersonReleased) {
    r.person_ids.push_back(persons_[static_cast<std::size_t>(e.person)].id);
  } else if (e.kind == EventKind::TaskComplete) {
    for (int p : units_[static_cast<std::size_t>(e.unit)].persons()) {
      r.person_ids.push_back(persons_[static_cast<std::size_t>(p)].id);
    }
  }
  if (e.activity >= 0) r.activity = to_string(static_cast<Activity>(e.activity));
  trace_.push_back(std::move(r));
}

RunResult Simulator::result() const {
  RunResult res;
  res.duration = end_time_;
  res.per_item_trace = ledgers_;
  for (const auto& ledger : ledgers_) {
    res.defects_coded += ledger.injected_coding;
    res.defects_injected_rework += ledger.injected_rework;
    res.defects_found_inspection += ledger.found_inspection;
    if (ledger.inspected) {
      ++res.items_inspected;
      res.defects_missed_inspection += ledger.latent_at_inspection - ledger.found_inspection;
    }
    res.defects_after_inspection += ledger.after_inspection;
    res.defects_found_test += ledger.found_test;
    res.defects_remaining += ledger.remaining;
    for (const auto& [activity, hours] : ledger.effort_by_phase) res.per_phase_effort[activity] += hours;
  }
  // Sum in a fixed activity order so totals are reproducible bit for bit.
  for (const auto& [activity, hours] : res.per_phase_effort) res.total_effort += hours;
  return res;
}

RunResult run_simulation(const Scenario& scenario, int replication) {
  Simulator sim(scenario, replication);
  sim.run_to_end();
  return sim.result();
}

}  // namespace inspsim
