#include "inspsim/policy.hpp"

namespace inspsim {

bool select_for_inspection(const Item& item, const InspectionPolicy& policy) {
  switch (policy.kind) {
    case PolicyKind::None: return false;
    case PolicyKind::All: return true;
    case PolicyKind::DensityThreshold:
      // latent / KLOC > t, kept in integer-friendly form to avoid rounding at the boundary.
      return item.latent_defects * 1000.0 > policy.threshold * item.size_loc;
    case PolicyKind::SizeThreshold: return item.size_loc >= policy.min_loc;
  }
  return false;
}

std::optional<std::vector<int>> form_team(StaffPool& pool, int team_size, int author, double at, int* request_id) {
  if (team_size >= pool.staff_size()) {
    throw UnsatisfiableRequest("inspection team of " + std::to_string(team_size) +
                               " cannot exclude the author from a staff of " + std::to_string(pool.staff_size()));
  }
  const int id = pool.request(team_size, at, author);
  if (request_id) *request_id = id;
  for (auto& grant : pool.dispatch(at)) {
    if (grant.request == id) return grant.persons;
  }
  return std::nullopt;
}

}  // namespace inspsim
