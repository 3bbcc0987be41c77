#pragma once

// Quantitative sub-process models: activity durations, defect injection,
// detection and rework, learning and time pressure.
//
// Functional forms (multiplicative composition, per-defect Bernoulli
// detection, logistic learning, clamped power-law pressure) are modeling
// choices; every constant lives in Calibration.

#include <span>

#include "inspsim/domain.hpp"
#include "inspsim/rng.hpp"

namespace inspsim {

struct PressureState {
  double planned_remaining = 0.0;
  double projected_remaining = 0.0;
};

// Logistic learning curve s_min + (s_max - s_min) / (1 + exp(-k (e - e0))).
double skill_multiplier(double experience_kloc, const LearningParams& params);

double coding_skill_multiplier(const Person& person, const Calibration& calib);
double inspection_skill_multiplier(const Person& person, const Calibration& calib);

// Productivity multiplier clamp(ratio^gamma, lo, hi), ratio = projected / planned.
// A schedule with nothing planned left counts as maximal pressure.
double pressure_factor(const PressureState& state, const PressureParams& params);
// Defect-injection penalty clamp(ratio^delta, 1, penalty_hi).
double injection_pressure_penalty(const PressureState& state, const PressureParams& params);

// Per-task fatigue multiplier on working time, lognormal with mean 1 and the
// person's sigma.
double fatigue_sample(const Person& person, RandomStream& rng);

double coding_duration(const Item& item, const Person& person, const Calibration& calib,
                       const PressureState& pressure, RandomStream& rng);

int defects_injected(const Item& item, const Person& person, const Calibration& calib,
                     const PressureState& pressure, RandomStream& rng);

double detection_probability(const Person& inspector, const Calibration& calib);

// 1 - prod(1 - p_i).
double team_detection_probability(std::span<const double> individual);

// Each latent defect is found independently with the team probability.
int team_detection(int latent, std::span<const double> individual, RandomStream& rng);
int team_detection(int latent, std::span<const Person> team, const Calibration& calib, RandomStream& rng);

struct InspectionTime {
  double elapsed = 0.0;  // longest individual preparation
  double effort = 0.0;   // sum over inspectors
};

InspectionTime inspection_duration(const Item& item, std::span<const Person> team, const Calibration& calib,
                                   RandomStream& rng);

struct ReworkOutcome {
  double hours = 0.0;
  int new_defects = 0;
};

ReworkOutcome rework(int found, const Person& person, const Calibration& calib, RandomStream& rng);
// Final-pass rework after test: same effort model, nothing re-injected.
ReworkOutcome final_rework(int found, const Person& person, const Calibration& calib);

struct TestPlan {
  double hours = 0.0;
  int removed = 0;
  int remaining = 0;
};

// Test runs until the item's density reaches the target; deterministic in the latent count.
TestPlan test_plan(int latent, int size_loc, const Calibration& calib);

// Adds the task's KLOC to the experience counter matching the activity.
void learning_update(Person& person, Activity activity, int size_loc);

}  // namespace inspsim
