#include "inspsim/process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace inspsim {

double skill_multiplier(double experience_kloc, const LearningParams& p) {
  return p.s_min + (p.s_max - p.s_min) / (1.0 + std::exp(-p.k * (experience_kloc - p.e0)));
}

double coding_skill_multiplier(const Person& person, const Calibration& calib) {
  return person.coding_skill * skill_multiplier(person.experience_coding, calib.learning);
}

double inspection_skill_multiplier(const Person& person, const Calibration& calib) {
  return person.inspection_skill * skill_multiplier(person.experience_inspection, calib.learning);
}

namespace {

double schedule_ratio(const PressureState& s, double when_unplanned) {
  if (s.planned_remaining <= 0.0) return when_unplanned;
  return s.projected_remaining / s.planned_remaining;
}

}  // namespace

double pressure_factor(const PressureState& state, const PressureParams& p) {
  const double ratio = schedule_ratio(state, -1.0);
  if (ratio < 0.0) return p.hi;
  return std::clamp(std::pow(ratio, p.gamma), p.lo, p.hi);
}

double injection_pressure_penalty(const PressureState& state, const PressureParams& p) {
  const double ratio = schedule_ratio(state, -1.0);
  if (ratio < 0.0) return p.penalty_hi;
  return std::clamp(std::pow(ratio, p.delta), 1.0, p.penalty_hi);
}

double fatigue_sample(const Person& person, RandomStream& rng) {
  return rng.lognormal(1.0, person.fatigue_sigma);
}

double coding_duration(const Item& item, const Person& person, const Calibration& calib,
                       const PressureState& pressure, RandomStream& rng) {
  const double work = item.size_loc * item.complexity;
  const double rate =
      person.coding_productivity * coding_skill_multiplier(person, calib) * pressure_factor(pressure, calib.pressure);
  return work / rate * fatigue_sample(person, rng);
}

int defects_injected(const Item& item, const Person& person, const Calibration& calib,
                     const PressureState& pressure, RandomStream& rng) {
  const double noise = rng.sample(calib.distribution_table.at(kInjectionNoise));
  const double expected = item.size_kloc() * calib.base_defect_density * item.complexity *
                          person.defect_factor * injection_pressure_penalty(pressure, calib.pressure) * noise;
  return std::max(0, static_cast<int>(std::lround(expected)));
}

double detection_probability(const Person& inspector, const Calibration& calib) {
  return std::clamp(calib.base_detection_prob * inspection_skill_multiplier(inspector, calib), 0.0, 1.0);
}

double team_detection_probability(std::span<const double> individual) {
  double miss = 1.0;
  for (double p : individual) miss *= 1.0 - std::clamp(p, 0.0, 1.0);
  return 1.0 - miss;
}

int team_detection(int latent, std::span<const double> individual, RandomStream& rng) {
  if (individual.empty()) throw std::invalid_argument("team_detection: empty team");
  return rng.bernoulli_count(std::max(0, latent), team_detection_probability(individual));
}

int team_detection(int latent, std::span<const Person> team, const Calibration& calib, RandomStream& rng) {
  std::vector<double> probs;
  probs.reserve(team.size());
  for (const auto& person : team) probs.push_back(detection_probability(person, calib));
  return team_detection(latent, probs, rng);
}

InspectionTime inspection_duration(const Item& item, std::span<const Person> team, const Calibration& calib,
                                   RandomStream& rng) {
  if (team.empty()) throw std::invalid_argument("inspection_duration: empty team");
  InspectionTime time;
  for (const auto& inspector : team) {
    const double rate = inspector.inspection_productivity * inspection_skill_multiplier(inspector, calib);
    const double reading = item.size_loc / rate * fatigue_sample(inspector, rng);
    time.elapsed = std::max(time.elapsed, reading);
    time.effort += reading;
  }
  return time;
}

ReworkOutcome rework(int found, const Person& person, const Calibration& calib, RandomStream& rng) {
  ReworkOutcome out = final_rework(found, person, calib);
  out.new_defects = rng.bernoulli_count(std::max(0, found), calib.rework_injection_rate);
  return out;
}

ReworkOutcome final_rework(int found, const Person& person, const Calibration& calib) {
  ReworkOutcome out;
  if (found <= 0) return out;
  out.hours = found * calib.rework_fix_effort / coding_skill_multiplier(person, calib);
  return out;
}

TestPlan test_plan(int latent, int size_loc, const Calibration& calib) {
  TestPlan plan;
  if (latent <= 0) return plan;
  // The epsilon keeps exact products such as 1.5 * 2000 / 1000 from flooring low.
  const int allowed = static_cast<int>(std::floor(calib.target_defect_density * size_loc / 1000.0 + 1e-9));
  plan.remaining = std::min(latent, allowed);
  plan.removed = latent - plan.remaining;
  plan.hours = plan.removed / calib.test_removal_rate;
  return plan;
}

void learning_update(Person& person, Activity activity, int size_loc) {
  const double kloc = size_loc / 1000.0;
  switch (activity) {
    case Activity::Coding: person.experience_coding += kloc; break;
    case Activity::Inspection: person.experience_inspection += kloc; break;
    default: break;
  }
}

}  // namespace inspsim
