#pragma once

#include <optional>
#include <vector>

#include "inspsim/domain.hpp"
#include "inspsim/staff_pool.hpp"

namespace inspsim {

// Whether a freshly coded item goes to inspection. The density rule reads the
// true latent count, which makes it an omniscient baseline for selection.
bool select_for_inspection(const Item& item, const InspectionPolicy& policy);

// Requests an inspection team of `team_size` persons excluding the author.
// Returns the team if the pool can form it now, otherwise the request waits
// and its id is reported through `request_id`.
std::optional<std::vector<int>> form_team(StaffPool& pool, int team_size, int author, double at,
                                          int* request_id = nullptr);

}  // namespace inspsim
