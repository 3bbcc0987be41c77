#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "inspsim/domain.hpp"

namespace inspsim {

// Scenario files are JSON with top-level sections items, persons, calibration,
// policy, switches, seed and replications. Absent fields take their defaults.
nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& doc);

nlohmann::json calibration_to_json(const Calibration& calib);
Calibration calibration_from_json(const nlohmann::json& doc);

nlohmann::json policy_to_json(const InspectionPolicy& policy);
InspectionPolicy policy_from_json(const nlohmann::json& doc);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

}  // namespace inspsim
