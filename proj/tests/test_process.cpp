#include <doctest.h>

#include <cmath>
#include <vector>

#include "generators.hpp"
#include "inspsim/process.hpp"
#include "inspsim/rng.hpp"

using namespace inspsim;
using namespace inspsim::testing;

namespace {

const PressureState kNeutral{10.0, 10.0};

Person nominal_person(double fatigue = 0.0) {
  Person p = plain_person("p");
  p.coding_productivity = 25.0;
  p.inspection_productivity = 18.0;
  p.fatigue_sigma = fatigue;
  return p;
}

}  // namespace

TEST_CASE("coding duration follows the productivity formula") {
  Calibration c = noiseless_calibration();
  RandomStream rng(1);
  Item item = plain_item("a", 500);
  Person p = nominal_person();
  CHECK(coding_duration(item, p, c, kNeutral, rng) == doctest::Approx(20.0).epsilon(1e-12));
  p.coding_skill = 2.0;
  CHECK(coding_duration(item, p, c, kNeutral, rng) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("fatigue noise leaves the mean coding time unbiased") {
  Calibration c = noiseless_calibration();
  Item item = plain_item("a", 500);
  RandomStream rng(2024);
  const double exact = coding_duration(item, nominal_person(), c, kNeutral, rng);
  const Person tired = nominal_person(0.3);
  double sum = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double h = coding_duration(item, tired, c, kNeutral, rng);
    CHECK_UNARY(h > 0.0);
    sum += h;
  }
  CHECK(std::abs(sum / n - exact) / exact < 0.02);
}

TEST_CASE("defect injection") {
  Calibration c = noiseless_calibration();
  RandomStream rng(3);
  const Person p = nominal_person();
  CHECK(defects_injected(plain_item("a", 1000), p, c, kNeutral, rng) == 44);
  CHECK(defects_injected(plain_item("b", 1), p, c, kNeutral, rng) >= 0);
  // Oracle for the base density: 1135 coded defects over 25,669 LOC.
  CHECK(1135.0 / 25.669 == doctest::Approx(c.base_defect_density).epsilon(0.001));

  Calibration noisy = default_calibration();
  double sum = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) sum += defects_injected(plain_item("c", 1000), p, noisy, kNeutral, rng);
  CHECK(std::abs(sum / n - 44.2) / 44.2 < 0.02);
}

TEST_CASE("team detection boundaries") {
  RandomStream rng(4);
  const std::vector<double> never{0.0};
  const std::vector<double> always{1.0};
  CHECK(team_detection(100, never, rng) == 0);
  CHECK(team_detection(100, always, rng) == 100);
  CHECK(team_detection(0, always, rng) == 0);
  const std::vector<double> three(3, 0.243);
  CHECK(team_detection_probability(three) == doctest::Approx(1.0 - std::pow(0.757, 3)));
}

TEST_CASE("team detection matches the closed form") {
  RandomStream rng(5);
  for (int n : {1, 3, 7}) {
    const std::vector<double> team(static_cast<std::size_t>(n), 0.243);
    const double expected = 100.0 * (1.0 - std::pow(1.0 - 0.243, n));
    double sum = 0.0;
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) sum += team_detection(100, team, rng);
    CHECK(std::abs(sum / trials - expected) / expected < 0.01);
  }
}

TEST_CASE("marginal detection gain is strictly decreasing") {
  const double p = 0.45;
  double prev_gain = 1e9;
  double prev = 0.0;
  for (int n = 1; n <= 10; ++n) {
    const double found = 100.0 * team_detection_probability(std::vector<double>(static_cast<std::size_t>(n), p));
    const double gain = found - prev;
    CHECK(gain == doctest::Approx(100.0 * p * std::pow(1.0 - p, n - 1)));
    CHECK(gain < prev_gain);
    prev_gain = gain;
    prev = found;
  }
}

TEST_CASE("detection probability is clamped") {
  Calibration c = default_calibration();
  Person p = nominal_person();
  p.inspection_skill = 10.0;
  CHECK(detection_probability(p, c) == 1.0);
  p.inspection_skill = 1.0;
  CHECK(detection_probability(p, c) == doctest::Approx(c.base_detection_prob));
}

TEST_CASE("inspection time: max for elapsed, sum for effort") {
  Calibration c = noiseless_calibration();
  c.nominal_inspection_rate = 100.0;
  RandomStream rng(6);
  Person p = nominal_person();
  p.inspection_productivity = 100.0;
  const Item item = plain_item("a", 200);
  auto one = inspection_duration(item, std::vector<Person>{p}, c, rng);
  CHECK(one.elapsed == doctest::Approx(2.0));
  CHECK(one.effort == doctest::Approx(2.0));
  auto four = inspection_duration(item, std::vector<Person>(4, p), c, rng);
  CHECK(four.elapsed == doctest::Approx(2.0));
  CHECK(four.effort == doctest::Approx(8.0));
}

TEST_CASE("inspection effort grows and elapsed time does not with team size") {
  Calibration c = noiseless_calibration();
  std::vector<Person> roster;
  for (int i = 0; i < 10; ++i) {
    Person p = nominal_person();
    p.inspection_skill = 0.6 + 0.1 * i;
    roster.push_back(p);
  }
  const Item item = plain_item("a", 350);
  double prev_effort = 0.0;
  double prev_elapsed = 1e18;
  for (std::size_t n = 1; n <= 10; ++n) {
    RandomStream rng(7);
    const std::vector<Person> team(roster.begin(), roster.begin() + static_cast<long>(n));
    const auto t = inspection_duration(item, team, c, rng);
    CHECK(t.effort > prev_effort);
    CHECK(t.elapsed <= prev_elapsed);
    prev_effort = t.effort;
    prev_elapsed = t.elapsed;
  }
}

TEST_CASE("rework") {
  Calibration c = noiseless_calibration();
  RandomStream rng(8);
  const Person p = nominal_person();
  const auto none = rework(0, p, c, rng);
  CHECK(none.hours == 0.0);
  CHECK(none.new_defects == 0);

  c.rework_fix_effort = 0.5;
  c.rework_injection_rate = 0.0;
  const auto clean = rework(20, p, c, rng);
  CHECK(clean.hours == doctest::Approx(10.0));
  CHECK(clean.new_defects == 0);

  c.rework_injection_rate = 0.1;
  double sum = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) sum += rework(20, p, c, rng).new_defects;
  CHECK(std::abs(sum / n - 2.0) < 0.1);

  const auto last = final_rework(20, p, c);
  CHECK(last.hours == doctest::Approx(10.0));
  CHECK(last.new_defects == 0);
}

TEST_CASE("test plan runs to the target density") {
  const Calibration c = default_calibration();
  auto plan = test_plan(2, 1000, c);
  CHECK(plan.remaining == 1);
  CHECK(plan.removed == 1);
  CHECK(plan.hours == doctest::Approx(1.0 / c.test_removal_rate));
  plan = test_plan(0, 1000, c);
  CHECK(plan.hours == 0.0);
  CHECK(plan.removed == 0);
  CHECK(plan.remaining == 0);
  for (int latent = 0; latent < 40; ++latent) {
    for (int size : {1, 199, 666, 667, 1000, 2500}) {
      const auto t = test_plan(latent, size, c);
      CHECK(t.removed + t.remaining == latent);
      CHECK(t.remaining <= static_cast<int>(std::floor(1.5 * size / 1000.0 + 1e-9)));
      CHECK(static_cast<double>(t.remaining) * 1000.0 / size <= 1.5 + 1e-9);
    }
  }
}

TEST_CASE("logistic learning curve") {
  const LearningParams l;
  CHECK(skill_multiplier(l.e0, l) == doctest::Approx((l.s_min + l.s_max) / 2.0));
  CHECK(skill_multiplier(1e6, l) == doctest::Approx(l.s_max));
  // Experience 8 with the defaults, evaluated two ways by hand.
  const double oracle = 0.7 + 0.6 / (1.0 + std::exp(-0.5 * (8.0 - 5.0)));
  CHECK(oracle == doctest::Approx(1.3 - 0.6 / (1.0 + std::exp(1.5))).epsilon(1e-12));
  CHECK(skill_multiplier(8.0, l) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(oracle == doctest::Approx(1.19054).epsilon(1e-5));
  double prev = skill_multiplier(0.0, l);
  for (double e = 0.25; e < 40.0; e += 0.25) {
    const double s = skill_multiplier(e, l);
    CHECK(s >= prev);
    CHECK(s >= l.s_min);
    CHECK(s <= l.s_max);
    prev = s;
  }
}

TEST_CASE("learning update adds KLOC to the matching counter") {
  Person p = nominal_person();
  learning_update(p, Activity::Coding, 1500);
  CHECK(p.experience_coding == doctest::Approx(6.5));
  CHECK(p.experience_inspection == doctest::Approx(5.0));
  learning_update(p, Activity::Inspection, 500);
  CHECK(p.experience_inspection == doctest::Approx(5.5));
  learning_update(p, Activity::Rework, 500);
  CHECK(p.experience_coding == doctest::Approx(6.5));
}

TEST_CASE("pressure factor") {
  const PressureParams pp;
  CHECK(pressure_factor({10.0, 10.0}, pp) == doctest::Approx(1.0));
  CHECK(pressure_factor({10.0, 40.0}, pp) == doctest::Approx(1.3));
  CHECK(pressure_factor({40.0, 10.0}, pp) == doctest::Approx(0.8));
  CHECK(pressure_factor({0.0, 10.0}, pp) == doctest::Approx(1.3));
  CHECK(injection_pressure_penalty({10.0, 10.0}, pp) == doctest::Approx(1.0));
  CHECK(injection_pressure_penalty({10.0, 1000.0}, pp) == doctest::Approx(1.25));
  CHECK(injection_pressure_penalty({10.0, 1.0}, pp) == doctest::Approx(1.0));
  double prev = 0.0;
  for (double ratio = 0.05; ratio < 5.0; ratio += 0.05) {
    const double f = pressure_factor({1.0, ratio}, pp);
    CHECK(f >= prev);
    CHECK(f >= pp.lo);
    CHECK(f <= pp.hi);
    prev = f;
  }
}

TEST_CASE("noise multipliers are unbiased") {
  RandomStream rng(9);
  const Distribution noise{DistributionKind::LogNormal, 1.0, 0.2};
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.sample(noise);
    CHECK_UNARY(x > 0.0);
    sum += x;
  }
  CHECK(std::abs(sum / n - 1.0) < 0.005);
}
