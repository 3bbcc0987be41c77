#include "inspsim/staff_pool.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "inspsim/event_queue.hpp"

namespace inspsim {

StaffPool::StaffPool(int staff_size) : status_(static_cast<std::size_t>(staff_size), PersonStatus::InPool) {
  for (int p = 0; p < staff_size; ++p) available_.push_back(p);
}

int StaffPool::request(int count, double at, std::optional<int> exclude, std::optional<int> require) {
  if (count < 1) throw std::invalid_argument("staff request for fewer than one person");
  if (count > staff_size()) {
    throw UnsatisfiableRequest("request for " + std::to_string(count) + " persons exceeds staff of " +
                               std::to_string(staff_size()));
  }
  if (require && (*require < 0 || *require >= staff_size() || require == exclude)) {
    throw UnsatisfiableRequest("request requires a person who can never be granted");
  }
  StaffRequest req;
  req.id = static_cast<int>(requests_.size());
  req.time = at;
  req.count = count;
  req.exclude = exclude;
  req.require = require;
  requests_.push_back(req);
  waiting_.push_back(req.id);
  return req.id;
}

std::optional<std::vector<int>> StaffPool::try_serve(const StaffRequest& req) const {
  std::vector<int> chosen;
  if (req.require) {
    if (std::find(available_.begin(), available_.end(), *req.require) == available_.end()) return std::nullopt;
    chosen.push_back(*req.require);
  }
  for (int p : available_) {
    if (static_cast<int>(chosen.size()) == req.count) break;
    if (p == req.exclude || p == req.require) continue;
    chosen.push_back(p);
  }
  if (static_cast<int>(chosen.size()) < req.count) return std::nullopt;
  return chosen;
}

std::vector<Grant> StaffPool::dispatch(double at) {
  std::vector<Grant> out;
  for (auto it = waiting_.begin(); it != waiting_.end() && !available_.empty();) {
    StaffRequest& req = requests_[static_cast<std::size_t>(*it)];
    auto persons = try_serve(req);
    if (!persons) {
      ++it;
      continue;
    }
    Grant grant{req.id, at, *persons, {available_.begin(), available_.end()}};
    for (int p : *persons) {
      status_[static_cast<std::size_t>(p)] = PersonStatus::Assigned;
      available_.erase(std::find(available_.begin(), available_.end(), p));
    }
    req.granted_at = at;
    req.grant_index = grants_.size();
    grants_.push_back(grant);
    out.push_back(std::move(grant));
    it = waiting_.erase(it);
  }
  return out;
}

std::optional<std::vector<int>> StaffPool::acquire(int count, double at, std::optional<int> exclude) {
  const int id = request(count, at, exclude);
  for (auto& grant : dispatch(at)) {
    if (grant.request == id) return grant.persons;
  }
  return std::nullopt;
}

void StaffPool::release(int person, double /*at*/) {
  auto& st = status_.at(static_cast<std::size_t>(person));
  if (st == PersonStatus::InPool) throw ModelFault("person " + std::to_string(person) + " released twice");
  st = PersonStatus::InPool;
  available_.push_back(person);
}

CompoundUnit::CompoundUnit(int id, int item, std::vector<int> persons, Activity activity)
    : id_(id), item_(item), persons_(std::move(persons)), activity_(activity) {}

std::vector<int> CompoundUnit::unbatch(StaffPool& pool, double at) {
  if (unbatched_) throw ModelFault("compound unit " + std::to_string(id_) + " unbatched twice");
  unbatched_ = true;
  for (int p : persons_) pool.release(p, at);
  return persons_;
}

CompoundUnit batch(int id, int item, std::vector<int> persons, Activity activity, const StaffPool& pool) {
  if (persons.empty()) throw std::invalid_argument("compound unit needs at least one person");
  std::set<int> seen;
  for (int p : persons) {
    if (!seen.insert(p).second) throw std::invalid_argument("person " + std::to_string(p) + " batched twice");
    if (pool.status(p) != PersonStatus::Assigned) {
      throw std::invalid_argument("person " + std::to_string(p) + " is not assigned");
    }
  }
  return CompoundUnit(id, item, std::move(persons), activity);
}

}  // namespace inspsim
