#include "inspsim/scenario_io.hpp"

#include <fstream>

namespace inspsim {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& doc, const char* key, T& out) {
  if (auto it = doc.find(key); it != doc.end() && !it->is_null()) out = it->get<T>();
}

std::string to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::Degenerate: return "degenerate";
    case DistributionKind::LogNormal: return "lognormal";
    case DistributionKind::Uniform: return "uniform";
  }
  return "?";
}

DistributionKind distribution_kind_from_string(const std::string& text) {
  if (text == "degenerate") return DistributionKind::Degenerate;
  if (text == "lognormal") return DistributionKind::LogNormal;
  if (text == "uniform") return DistributionKind::Uniform;
  throw ValidationError("calibration", "distribution_table", "unknown distribution kind '" + text + "'");
}

json distribution_to_json(const Distribution& d) {
  switch (d.kind) {
    case DistributionKind::Degenerate: return {{"kind", "degenerate"}, {"value", d.a}};
    case DistributionKind::LogNormal: return {{"kind", "lognormal"}, {"mean", d.a}, {"sigma", d.b}};
    case DistributionKind::Uniform: return {{"kind", "uniform"}, {"lower", d.a}, {"upper", d.b}};
  }
  return {{"kind", to_string(d.kind)}};
}

Distribution distribution_from_json(const json& doc) {
  Distribution d;
  d.kind = distribution_kind_from_string(doc.at("kind").get<std::string>());
  switch (d.kind) {
    case DistributionKind::Degenerate:
      read(doc, "value", d.a);
      break;
    case DistributionKind::LogNormal:
      read(doc, "mean", d.a);
      read(doc, "sigma", d.b);
      break;
    case DistributionKind::Uniform:
      read(doc, "lower", d.a);
      read(doc, "upper", d.b);
      break;
  }
  return d;
}

json item_to_json(const Item& item) {
  return {{"id", item.id},
          {"size_loc", item.size_loc},
          {"complexity", item.complexity},
          {"latent_defects", item.latent_defects}};
}

Item item_from_json(const json& doc) {
  Item item;
  read(doc, "id", item.id);
  read(doc, "size_loc", item.size_loc);
  read(doc, "complexity", item.complexity);
  read(doc, "latent_defects", item.latent_defects);
  return item;
}

json person_to_json(const Person& p) {
  return {{"id", p.id},
          {"coding_skill", p.coding_skill},
          {"inspection_skill", p.inspection_skill},
          {"coding_productivity", p.coding_productivity},
          {"inspection_productivity", p.inspection_productivity},
          {"defect_factor", p.defect_factor},
          {"experience_coding", p.experience_coding},
          {"experience_inspection", p.experience_inspection},
          {"fatigue_sigma", p.fatigue_sigma}};
}

Person person_from_json(const json& doc) {
  Person p;
  read(doc, "id", p.id);
  read(doc, "coding_skill", p.coding_skill);
  read(doc, "inspection_skill", p.inspection_skill);
  read(doc, "coding_productivity", p.coding_productivity);
  read(doc, "inspection_productivity", p.inspection_productivity);
  read(doc, "defect_factor", p.defect_factor);
  read(doc, "experience_coding", p.experience_coding);
  read(doc, "experience_inspection", p.experience_inspection);
  read(doc, "fatigue_sigma", p.fatigue_sigma);
  return p;
}

}  // namespace

json calibration_to_json(const Calibration& c) {
  json table = json::object();
  for (const auto& [name, dist] : c.distribution_table) table[name] = distribution_to_json(dist);
  return {{"base_defect_density", c.base_defect_density},
          {"nominal_coding_productivity", c.nominal_coding_productivity},
          {"nominal_inspection_rate", c.nominal_inspection_rate},
          {"base_detection_prob", c.base_detection_prob},
          {"rework_fix_effort", c.rework_fix_effort},
          {"rework_injection_rate", c.rework_injection_rate},
          {"test_removal_rate", c.test_removal_rate},
          {"target_defect_density", c.target_defect_density},
          {"inspection_threshold_density", c.inspection_threshold_density},
          {"team_size", c.team_size},
          {"learning",
           {{"s_min", c.learning.s_min}, {"s_max", c.learning.s_max}, {"k", c.learning.k}, {"e0", c.learning.e0}}},
          {"pressure",
           {{"gamma", c.pressure.gamma},
            {"lo", c.pressure.lo},
            {"hi", c.pressure.hi},
            {"delta", c.pressure.delta},
            {"penalty_hi", c.pressure.penalty_hi}}},
          {"distribution_table", table}};
}

Calibration calibration_from_json(const json& doc) {
  Calibration c = default_calibration();
  read(doc, "base_defect_density", c.base_defect_density);
  read(doc, "nominal_coding_productivity", c.nominal_coding_productivity);
  read(doc, "nominal_inspection_rate", c.nominal_inspection_rate);
  read(doc, "base_detection_prob", c.base_detection_prob);
  read(doc, "rework_fix_effort", c.rework_fix_effort);
  read(doc, "rework_injection_rate", c.rework_injection_rate);
  read(doc, "test_removal_rate", c.test_removal_rate);
  read(doc, "target_defect_density", c.target_defect_density);
  read(doc, "inspection_threshold_density", c.inspection_threshold_density);
  read(doc, "team_size", c.team_size);
  if (auto it = doc.find("learning"); it != doc.end()) {
    read(*it, "s_min", c.learning.s_min);
    read(*it, "s_max", c.learning.s_max);
    read(*it, "k", c.learning.k);
    read(*it, "e0", c.learning.e0);
  }
  if (auto it = doc.find("pressure"); it != doc.end()) {
    read(*it, "gamma", c.pressure.gamma);
    read(*it, "lo", c.pressure.lo);
    read(*it, "hi", c.pressure.hi);
    read(*it, "delta", c.pressure.delta);
    read(*it, "penalty_hi", c.pressure.penalty_hi);
  }
  if (auto it = doc.find("distribution_table"); it != doc.end()) {
    for (const auto& [name, dist] : it->items()) c.distribution_table[name] = distribution_from_json(dist);
  }
  return c;
}

json policy_to_json(const InspectionPolicy& p) {
  return {{"kind", to_string(p.kind)}, {"threshold", p.threshold}, {"min_loc", p.min_loc}, {"team_size", p.team_size}};
}

InspectionPolicy policy_from_json(const json& doc) {
  InspectionPolicy p;
  if (auto it = doc.find("kind"); it != doc.end()) p.kind = policy_kind_from_string(it->get<std::string>());
  read(doc, "threshold", p.threshold);
  read(doc, "min_loc", p.min_loc);
  read(doc, "team_size", p.team_size);
  return p;
}

json scenario_to_json(const Scenario& s) {
  json items = json::array();
  for (const auto& item : s.items) items.push_back(item_to_json(item));
  json persons = json::array();
  for (const auto& person : s.persons) persons.push_back(person_to_json(person));
  return {{"items", items},
          {"persons", persons},
          {"calibration", calibration_to_json(s.calibration)},
          {"policy", policy_to_json(s.policy)},
          {"switches",
           {{"inspection_on", s.switches.inspection_on},
            {"design_on", s.switches.design_on},
            {"test_on", s.switches.test_on}}},
          {"seed", s.seed},
          {"replications", s.replications}};
}

Scenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("scenario", "", "scenario document must be an object");
  Scenario s;
  s.calibration = default_calibration();
  if (auto it = doc.find("items"); it != doc.end()) {
    for (const auto& entry : *it) s.items.push_back(item_from_json(entry));
  }
  if (auto it = doc.find("persons"); it != doc.end()) {
    for (const auto& entry : *it) s.persons.push_back(person_from_json(entry));
  }
  if (auto it = doc.find("calibration"); it != doc.end()) s.calibration = calibration_from_json(*it);
  if (auto it = doc.find("policy"); it != doc.end()) s.policy = policy_from_json(*it);
  if (auto it = doc.find("switches"); it != doc.end()) {
    read(*it, "inspection_on", s.switches.inspection_on);
    read(*it, "design_on", s.switches.design_on);
    read(*it, "test_on", s.switches.test_on);
  }
  read(doc, "seed", s.seed);
  read(doc, "replications", s.replications);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("malformed scenario file " + path.string() + ": " + e.what());
  }
  return scenario_from_json(doc);
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file " + path.string());
  out << scenario_to_json(scenario).dump(2) << '\n';
}

}  // namespace inspsim
