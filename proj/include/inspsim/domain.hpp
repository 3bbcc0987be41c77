#pragma once

// Entity and configuration types shared by the simulator.
//
// Units are fixed project-wide: effort in person-hours, durations in hours,
// sizes in LOC, densities in defects per KLOC, experience in KLOC processed.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace inspsim {

using ItemId = std::string;
using PersonId = std::string;

enum class Phase {
  Queued,
  Coding,
  AwaitingInspection,
  InInspection,
  InRework,
  AwaitingTest,
  InTest,
  Done
};

enum class Activity { Design, Coding, Inspection, Rework, Test, TestRework };

std::string to_string(Phase phase);
std::string to_string(Activity activity);

enum class PersonStatus { InPool, Assigned };

struct Item {
  ItemId id;
  int size_loc = 0;
  double complexity = 1.0;
  int latent_defects = 0;
  int found_in_inspection = 0;
  int found_in_test = 0;
  Phase phase = Phase::Queued;
  std::map<Activity, double> effort_by_phase;
  double completion_time = 0.0;

  double size_kloc() const { return size_loc / 1000.0; }
  bool operator==(const Item&) const = default;
};

struct Person {
  PersonId id;
  double coding_skill = 1.0;
  double inspection_skill = 1.0;
  // Zero means "take the calibration nominal" and is filled in by validation.
  double coding_productivity = 0.0;
  double inspection_productivity = 0.0;
  double defect_factor = 1.0;
  // Negative means "take the learning midpoint e0" and is filled in by validation.
  double experience_coding = -1.0;
  double experience_inspection = -1.0;
  double fatigue_sigma = 0.0;
  PersonStatus status = PersonStatus::InPool;

  bool operator==(const Person&) const = default;
};

enum class DistributionKind { Degenerate, LogNormal, Uniform };

// A named entry of the distribution store. LogNormal is parameterized by its
// mean and the standard deviation of the underlying normal.
struct Distribution {
  DistributionKind kind = DistributionKind::Degenerate;
  double a = 1.0;  // Degenerate: value; LogNormal: mean; Uniform: lower bound
  double b = 0.0;  // LogNormal: sigma of log; Uniform: upper bound

  double mean() const;
  bool operator==(const Distribution&) const = default;
};

struct LearningParams {
  double s_min = 0.7;
  double s_max = 1.3;
  double k = 0.5;   // per KLOC
  double e0 = 5.0;  // KLOC
  bool operator==(const LearningParams&) const = default;
};

struct PressureParams {
  double gamma = 0.5;
  double lo = 0.8;
  double hi = 1.3;
  double delta = 0.25;
  double penalty_hi = 1.25;
  bool operator==(const PressureParams&) const = default;
};

struct Calibration {
  double base_defect_density = 44.2;
  double nominal_coding_productivity = 25.0;
  double nominal_inspection_rate = 18.0;
  double base_detection_prob = 0.45;
  double rework_fix_effort = 1.5;
  double rework_injection_rate = 0.1;
  double test_removal_rate = 0.16;
  double target_defect_density = 1.5;
  double inspection_threshold_density = 35.0;
  int team_size = 3;
  LearningParams learning;
  PressureParams pressure;
  std::map<std::string, Distribution> distribution_table;

  bool operator==(const Calibration&) const = default;
};

// Names looked up in Calibration::distribution_table.
inline constexpr const char* kInjectionNoise = "injection_noise";
inline constexpr const char* kDesignDelay = "design_delay";

Calibration default_calibration();

enum class PolicyKind { None, All, DensityThreshold, SizeThreshold };

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& text);

struct InspectionPolicy {
  PolicyKind kind = PolicyKind::All;
  double threshold = 35.0;  // defects/KLOC for DensityThreshold
  int min_loc = 0;          // for SizeThreshold
  int team_size = 0;        // 0 takes Calibration::team_size

  bool operator==(const InspectionPolicy&) const = default;
};

struct Switches {
  bool inspection_on = true;
  bool design_on = false;
  bool test_on = true;
  bool operator==(const Switches&) const = default;
};

struct Scenario {
  std::vector<Item> items;
  std::vector<Person> persons;
  Calibration calibration;
  InspectionPolicy policy;
  Switches switches;
  std::uint64_t seed = 1;
  int replications = 1;

  int total_loc() const;
  bool operator==(const Scenario&) const = default;
};

struct ItemLedger {
  ItemId id;
  int size_loc = 0;
  int initial_latent = 0;
  int injected_coding = 0;
  int injected_rework = 0;
  bool inspected = false;
  int latent_at_inspection = 0;
  int found_inspection = 0;
  int after_inspection = 0;  // latent count entering test
  int found_test = 0;
  int remaining = 0;
  double completion_time = 0.0;
  std::map<Activity, double> effort_by_phase;

  bool operator==(const ItemLedger&) const = default;
};

struct RunResult {
  double total_effort = 0.0;
  double duration = 0.0;
  int defects_coded = 0;
  int defects_injected_rework = 0;
  int defects_found_inspection = 0;
  int defects_missed_inspection = 0;
  int defects_after_inspection = 0;
  int defects_found_test = 0;
  int defects_remaining = 0;
  int items_inspected = 0;
  std::vector<ItemLedger> per_item_trace;
  std::map<Activity, double> per_phase_effort;

  bool operator==(const RunResult&) const = default;
};

// A violated invariant, naming the offending entity and field.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string entity, std::string field, const std::string& message)
      : std::runtime_error(message), entity_(std::move(entity)), field_(std::move(field)) {}

  const std::string& entity() const { return entity_; }
  const std::string& field() const { return field_; }

 private:
  std::string entity_;
  std::string field_;
};

// Returns the scenario with defaulted fields filled in, or throws
// ValidationError on the first violated invariant.
Scenario validate_scenario(Scenario scenario);

}  // namespace inspsim
