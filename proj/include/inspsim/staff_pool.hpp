#pragma once

#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "inspsim/domain.hpp"

namespace inspsim {

class UnsatisfiableRequest : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StaffRequest {
  int id = 0;
  double time = 0.0;
  int count = 1;
  std::optional<int> exclude;  // never granted this person (the item's author)
  std::optional<int> require;  // always granted this person (rework by the author)
  std::optional<double> granted_at;
  std::optional<std::size_t> grant_index;
};

struct Grant {
  int request = 0;
  double time = 0.0;
  std::vector<int> persons;
  // Pool state just before this grant, kept for FCFS audits.
  std::vector<int> available_before;
};

// Staff pool with first-come-first-served assignment on both sides: waiting
// requests are scanned in arrival order and served by the longest-waiting
// persons. A request is only passed over while the current pool cannot
// satisfy it.
class StaffPool {
 public:
  explicit StaffPool(int staff_size);

  int staff_size() const { return static_cast<int>(status_.size()); }

  // Enqueues a request; throws UnsatisfiableRequest when it could never be met
  // by the whole staff.
  int request(int count, double at, std::optional<int> exclude = {}, std::optional<int> require = {});

  // Serves every waiting request the pool can satisfy, in arrival order.
  std::vector<Grant> dispatch(double at);

  // request() followed by dispatch(); the persons granted to this request, or
  // nullopt if it is left waiting.
  std::optional<std::vector<int>> acquire(int count, double at, std::optional<int> exclude = {});

  void release(int person, double at);

  PersonStatus status(int person) const { return status_.at(static_cast<std::size_t>(person)); }
  int available_count() const { return static_cast<int>(available_.size()); }
  int assigned_count() const { return staff_size() - available_count(); }
  std::size_t waiting_count() const { return waiting_.size(); }
  const std::deque<int>& available() const { return available_; }

  const std::vector<StaffRequest>& requests() const { return requests_; }
  const std::vector<Grant>& grants() const { return grants_; }

 private:
  std::optional<std::vector<int>> try_serve(const StaffRequest& req) const;

  std::vector<PersonStatus> status_;
  std::deque<int> available_;
  std::vector<int> waiting_;  // request ids in arrival order
  std::vector<StaffRequest> requests_;
  std::vector<Grant> grants_;
};

// A batch of one item with the persons working on it for one activity.
class CompoundUnit {
 public:
  CompoundUnit(int id, int item, std::vector<int> persons, Activity activity);

  int id() const { return id_; }
  int item() const { return item_; }
  const std::vector<int>& persons() const { return persons_; }
  Activity activity() const { return activity_; }
  bool unbatched() const { return unbatched_; }

  // Returns every person to the pool in batch order; a second call is a model fault.
  std::vector<int> unbatch(StaffPool& pool, double at);

 private:
  int id_;
  int item_;
  std::vector<int> persons_;
  Activity activity_;
  bool unbatched_ = false;
};

CompoundUnit batch(int id, int item, std::vector<int> persons, Activity activity, const StaffPool& pool);

}  // namespace inspsim
