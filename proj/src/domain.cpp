#include "inspsim/domain.hpp"

#include <cmath>
#include <numeric>
#include <set>

namespace inspsim {

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::Queued: return "Queued";
    case Phase::Coding: return "Coding";
    case Phase::AwaitingInspection: return "AwaitingInspection";
    case Phase::InInspection: return "InInspection";
    case Phase::InRework: return "InRework";
    case Phase::AwaitingTest: return "AwaitingTest";
    case Phase::InTest: return "InTest";
    case Phase::Done: return "Done";
  }
  return "?";
}

std::string to_string(Activity activity) {
  switch (activity) {
    case Activity::Design: return "design";
    case Activity::Coding: return "coding";
    case Activity::Inspection: return "inspection";
    case Activity::Rework: return "rework";
    case Activity::Test: return "test";
    case Activity::TestRework: return "test_rework";
  }
  return "?";
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::None: return "none";
    case PolicyKind::All: return "all";
    case PolicyKind::DensityThreshold: return "density_threshold";
    case PolicyKind::SizeThreshold: return "size_threshold";
  }
  return "?";
}

PolicyKind policy_kind_from_string(const std::string& text) {
  if (text == "none") return PolicyKind::None;
  if (text == "all") return PolicyKind::All;
  if (text == "density_threshold" || text == "threshold") return PolicyKind::DensityThreshold;
  if (text == "size_threshold") return PolicyKind::SizeThreshold;
  throw ValidationError("policy", "kind", "unknown policy kind '" + text + "'");
}

double Distribution::mean() const {
  switch (kind) {
    case DistributionKind::Degenerate: return a;
    case DistributionKind::LogNormal: return a;
    case DistributionKind::Uniform: return 0.5 * (a + b);
  }
  return a;
}

Calibration default_calibration() {
  Calibration calib;
  calib.distribution_table[kInjectionNoise] = {DistributionKind::LogNormal, 1.0, 0.2};
  calib.distribution_table[kDesignDelay] = {DistributionKind::Uniform, 0.0, 80.0};
  return calib;
}

int Scenario::total_loc() const {
  return std::accumulate(items.begin(), items.end(), 0,
                         [](int acc, const Item& item) { return acc + item.size_loc; });
}

namespace {

void require(bool ok, const std::string& entity, const std::string& field,
             const std::string& what) {
  if (!ok) throw ValidationError(entity, field, entity + "." + field + ": " + what);
}

void require_positive(double value, const std::string& entity, const std::string& field) {
  require(std::isfinite(value) && value > 0.0, entity, field, "must be positive");
}

void validate_distribution(const std::string& name, const Distribution& dist) {
  const std::string entity = "calibration.distribution_table." + name;
  switch (dist.kind) {
    case DistributionKind::Degenerate:
      require(std::isfinite(dist.a) && dist.a >= 0.0, entity, "value", "must be non-negative");
      break;
    case DistributionKind::LogNormal:
      require_positive(dist.a, entity, "mean");
      require(std::isfinite(dist.b) && dist.b >= 0.0, entity, "sigma", "must be non-negative");
      break;
    case DistributionKind::Uniform:
      require(std::isfinite(dist.a) && dist.a >= 0.0, entity, "lower", "must be non-negative");
      require(std::isfinite(dist.b) && dist.b >= dist.a, entity, "upper",
              "must not be below lower");
      break;
  }
}

void validate_calibration(Calibration& calib) {
  const std::string entity = "calibration";
  require_positive(calib.base_defect_density, entity, "base_defect_density");
  require_positive(calib.nominal_coding_productivity, entity, "nominal_coding_productivity");
  require_positive(calib.nominal_inspection_rate, entity, "nominal_inspection_rate");
  require_positive(calib.base_detection_prob, entity, "base_detection_prob");
  require(calib.base_detection_prob <= 1.0, entity, "base_detection_prob", "must be at most 1");
  require_positive(calib.rework_fix_effort, entity, "rework_fix_effort");
  require(calib.rework_injection_rate >= 0.0 && calib.rework_injection_rate < 1.0, entity,
          "rework_injection_rate", "must lie in [0, 1)");
  require_positive(calib.test_removal_rate, entity, "test_removal_rate");
  require_positive(calib.target_defect_density, entity, "target_defect_density");
  require_positive(calib.inspection_threshold_density, entity, "inspection_threshold_density");
  require(calib.team_size >= 1, entity, "team_size", "must be at least 1");

  const auto& l = calib.learning;
  require_positive(l.s_min, entity, "learning.s_min");
  require(l.s_min <= l.s_max, entity, "learning.s_max", "must not be below s_min");
  require_positive(l.k, entity, "learning.k");
  require(std::isfinite(l.e0) && l.e0 >= 0.0, entity, "learning.e0", "must be non-negative");

  const auto& p = calib.pressure;
  require(std::isfinite(p.gamma) && p.gamma >= 0.0, entity, "pressure.gamma", "must be non-negative");
  require(p.lo > 0.0 && p.lo <= 1.0, entity, "pressure.lo", "must lie in (0, 1]");
  require(p.hi >= 1.0 && std::isfinite(p.hi), entity, "pressure.hi", "must be at least 1");
  require(std::isfinite(p.delta) && p.delta >= 0.0, entity, "pressure.delta", "must be non-negative");
  require(p.penalty_hi >= 1.0 && std::isfinite(p.penalty_hi), entity, "pressure.penalty_hi",
          "must be at least 1");

  const Calibration defaults = default_calibration();
  for (const auto& [name, dist] : defaults.distribution_table) {
    calib.distribution_table.try_emplace(name, dist);
  }
  for (const auto& [name, dist] : calib.distribution_table) {
    validate_distribution(name, dist);
  }
  const auto& noise = calib.distribution_table.at(kInjectionNoise);
  require(std::abs(noise.mean() - 1.0) < 1e-12,
          "calibration.distribution_table." + std::string(kInjectionNoise), "mean",
          "noise multipliers must have mean 1");
}

}  // namespace

Scenario validate_scenario(Scenario s) {
  require(!s.items.empty(), "scenario", "items", "empty item list");
  if (s.persons.empty()) throw ValidationError("scenario", "persons", "empty person pool");
  require(s.replications >= 1, "scenario", "replications", "must be at least 1");

  validate_calibration(s.calibration);
  const Calibration& calib = s.calibration;

  std::set<ItemId> item_ids;
  for (auto& item : s.items) {
    const std::string entity = "item '" + item.id + "'";
    require(!item.id.empty(), entity, "id", "must not be empty");
    require(item_ids.insert(item.id).second, entity, "id", "duplicate item id");
    require(item.size_loc > 0, entity, "size_loc", "must be positive");
    require_positive(item.complexity, entity, "complexity");
    require(item.latent_defects >= 0, entity, "latent_defects", "must be non-negative");
    require(item.found_in_inspection >= 0 && item.found_in_test >= 0, entity, "found",
            "must be non-negative");
  }

  std::set<PersonId> person_ids;
  for (auto& person : s.persons) {
    const std::string entity = "person '" + person.id + "'";
    require(!person.id.empty(), entity, "id", "must not be empty");
    require(person_ids.insert(person.id).second, entity, "id", "duplicate person id");
    if (person.coding_productivity == 0.0) person.coding_productivity = calib.nominal_coding_productivity;
    if (person.inspection_productivity == 0.0) person.inspection_productivity = calib.nominal_inspection_rate;
    if (person.experience_coding < 0.0) person.experience_coding = calib.learning.e0;
    if (person.experience_inspection < 0.0) person.experience_inspection = calib.learning.e0;
    require_positive(person.coding_skill, entity, "coding_skill");
    require_positive(person.inspection_skill, entity, "inspection_skill");
    require_positive(person.coding_productivity, entity, "coding_productivity");
    require_positive(person.inspection_productivity, entity, "inspection_productivity");
    require_positive(person.defect_factor, entity, "defect_factor");
    require(std::isfinite(person.fatigue_sigma) && person.fatigue_sigma >= 0.0, entity,
            "fatigue_sigma", "must be non-negative");
    require(person.status == PersonStatus::InPool, entity, "status", "must start in the pool");
  }

  auto& policy = s.policy;
  if (policy.team_size == 0) policy.team_size = calib.team_size;
  require(policy.team_size >= 1, "policy", "team_size", "must be at least 1");
  if (policy.kind == PolicyKind::DensityThreshold) {
    require_positive(policy.threshold, "policy", "threshold");
  }
  if (policy.kind == PolicyKind::SizeThreshold) {
    require(policy.min_loc > 0, "policy", "min_loc", "must be positive");
  }
  // The author never inspects their own item, so a team needs staff - 1 others.
  if (s.switches.inspection_on && policy.kind != PolicyKind::None) {
    require(policy.team_size < static_cast<int>(s.persons.size()), "policy", "team_size",
            "team of " + std::to_string(policy.team_size) + " cannot be formed from a staff of " +
                std::to_string(s.persons.size()) + " excluding the author");
  }
  return s;
}

}  // namespace inspsim
