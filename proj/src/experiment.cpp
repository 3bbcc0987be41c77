#include "inspsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "inspsim/rng.hpp"
#include "inspsim/simulator.hpp"

namespace inspsim {

const MetricStats& Aggregate::at(const std::string& name) const {
  for (const auto& [metric, stats] : metrics) {
    if (metric == name) return stats;
  }
  throw std::out_of_range("unknown metric '" + name + "'");
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {
      "total_effort",     "duration",           "defects_coded",
      "defects_found_inspection", "defects_missed_inspection", "defects_after_inspection",
      "defects_found_test", "defects_remaining", "items_inspected"};
  return names;
}

double metric_value(const RunResult& run, const std::string& name) {
  if (name == "total_effort") return run.total_effort;
  if (name == "duration") return run.duration;
  if (name == "defects_coded") return run.defects_coded;
  if (name == "defects_found_inspection") return run.defects_found_inspection;
  if (name == "defects_missed_inspection") return run.defects_missed_inspection;
  if (name == "defects_after_inspection") return run.defects_after_inspection;
  if (name == "defects_found_test") return run.defects_found_test;
  if (name == "defects_remaining") return run.defects_remaining;
  if (name == "items_inspected") return run.items_inspected;
  throw std::out_of_range("unknown metric '" + name + "'");
}

Aggregate aggregate(const std::vector<RunResult>& runs) {
  Aggregate agg;
  agg.replications = static_cast<int>(runs.size());
  if (runs.empty()) return agg;
  for (const auto& name : metric_names()) {
    MetricStats stats;
    stats.min = stats.max = metric_value(runs.front(), name);
    double sum = 0.0;
    for (const auto& run : runs) {
      const double v = metric_value(run, name);
      sum += v;
      stats.min = std::min(stats.min, v);
      stats.max = std::max(stats.max, v);
    }
    const double n = static_cast<double>(runs.size());
    // Rounding can push the mean of identical values a hair outside [min, max].
    stats.mean = std::clamp(sum / n, stats.min, stats.max);
    if (runs.size() > 1) {
      double ss = 0.0;
      for (const auto& run : runs) {
        const double d = metric_value(run, name) - stats.mean;
        ss += d * d;
      }
      stats.sd = std::sqrt(ss / (n - 1.0));
    }
    agg.metrics.emplace_back(name, stats);
  }
  return agg;
}

ReplicationSet run_replications(const Scenario& scenario, ExecOptions exec) {
  const int reps = scenario.replications;
  std::vector<RunResult> runs(static_cast<std::size_t>(reps));
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  int error_rep = -1;

  auto worker = [&] {
    for (int r = next++; r < reps; r = next++) {
      try {
        runs[static_cast<std::size_t>(r)] = run_simulation(scenario, r);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error || r < error_rep) {
          error = std::current_exception();
          error_rep = r;
        }
      }
    }
  };

  const int workers = std::clamp(exec.workers, 1, std::max(1, reps));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  if (error) {
    try {
      std::rethrow_exception(error);
    } catch (const std::exception& e) {
      throw std::runtime_error("replication " + std::to_string(error_rep) + ": " + e.what());
    }
  }
  ReplicationSet set;
  set.aggregate = aggregate(runs);
  set.runs = std::move(runs);
  return set;
}

Comparison policy_comparison(const Scenario& base, ExecOptions exec) {
  Comparison cmp;
  cmp.size_loc = base.total_loc();
  const int team = base.policy.team_size > 0 ? base.policy.team_size : base.calibration.team_size;

  const std::vector<std::pair<std::string, InspectionPolicy>> variants = {
      {"No inspections", {PolicyKind::None, base.calibration.inspection_threshold_density, 0, team}},
      {"All inspected", {PolicyKind::All, base.calibration.inspection_threshold_density, 0, team}},
      {"Select item for inspection",
       {PolicyKind::DensityThreshold, base.calibration.inspection_threshold_density, 0, team}},
  };
  for (const auto& [label, policy] : variants) {
    Scenario s = base;
    s.policy = policy;
    s.switches.inspection_on = true;
    s = validate_scenario(std::move(s));
    cmp.variants.push_back({label, s.policy, run_replications(s, exec)});
  }
  return cmp;
}

SweepCurve team_size_sweep(const Scenario& base, const std::vector<int>& sizes, ExecOptions exec) {
  if (base.policy.kind != PolicyKind::All && base.policy.kind != PolicyKind::DensityThreshold) {
    throw ValidationError("policy", "kind", "team-size sweep needs an inspecting policy (all or density_threshold)");
  }
  SweepCurve curve;
  for (int size : sizes) {
    Scenario s = base;
    s.policy.team_size = size;
    s = validate_scenario(std::move(s));
    curve.points.push_back({size, run_replications(s, exec).aggregate});
  }
  return curve;
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> sizes;
  try {
    if (auto dots = text.find(".."); dots != std::string::npos) {
      const int lo = std::stoi(text.substr(0, dots));
      const int hi = std::stoi(text.substr(dots + 2));
      for (int s = lo; s <= hi; ++s) sizes.push_back(s);
    } else {
      std::size_t start = 0;
      while (start <= text.size()) {
        const auto comma = text.find(',', start);
        sizes.push_back(std::stoi(text.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
  } catch (const std::logic_error&) {
    throw std::invalid_argument("malformed size list '" + text + "'");
  }
  if (sizes.empty()) throw std::invalid_argument("empty size list '" + text + "'");
  for (int s : sizes) {
    if (s < 1) throw std::invalid_argument("team sizes must be at least 1");
  }
  return sizes;
}

std::vector<int> generate_item_sizes(int count, int total_loc, double median, double sigma_log, std::uint64_t seed) {
  if (count < 1 || total_loc < count) throw std::invalid_argument("cannot split total LOC over items");
  RandomStream rng(derive_seed(seed, static_cast<std::uint64_t>(StreamTag::Scenario), 1));
  std::vector<double> raw(static_cast<std::size_t>(count));
  for (auto& x : raw) x = median * std::exp(sigma_log * rng.normal());
  const double scale = total_loc / std::accumulate(raw.begin(), raw.end(), 0.0);

  std::vector<int> sizes;
  for (double x : raw) sizes.push_back(std::max(1, static_cast<int>(std::lround(x * scale))));
  // Absorb the rounding residual one LOC at a time, largest items first.
  int residual = total_loc - std::accumulate(sizes.begin(), sizes.end(), 0);
  std::vector<std::size_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return sizes[a] > sizes[b]; });
  for (std::size_t k = 0; residual != 0; k = (k + 1) % order.size()) {
    auto& s = sizes[order[k]];
    if (residual > 0) {
      ++s;
      --residual;
    } else if (s > 1) {
      --s;
      ++residual;
    }
  }
  return sizes;
}

Scenario table1_scenario(std::uint64_t seed) {
  Scenario s;
  s.calibration = default_calibration();
  s.seed = seed;
  s.replications = 20;
  s.policy = {PolicyKind::All, s.calibration.inspection_threshold_density, 0, s.calibration.team_size};
  s.switches = {true, false, true};

  const auto sizes = generate_item_sizes(100, 25669, 200.0, 0.6, seed);
  RandomStream rng(derive_seed(seed, static_cast<std::uint64_t>(StreamTag::Scenario), 2));
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    Item item;
    item.id = "item-" + std::to_string(i + 1);
    item.size_loc = sizes[i];
    item.complexity = rng.lognormal(1.0, 0.1);
    s.items.push_back(item);
  }
  for (int p = 0; p < 20; ++p) {
    Person person;
    person.id = "dev-" + std::to_string(p + 1);
    person.coding_skill = rng.lognormal(1.0, 0.15);
    person.inspection_skill = rng.lognormal(1.0, 0.15);
    person.coding_productivity = s.calibration.nominal_coding_productivity;
    person.inspection_productivity = s.calibration.nominal_inspection_rate;
    person.defect_factor = rng.lognormal(1.0, 0.15);
    person.experience_coding = rng.uniform(2.0, 8.0);
    person.experience_inspection = rng.uniform(2.0, 8.0);
    person.fatigue_sigma = 0.15;
    s.persons.push_back(person);
  }
  // Rescale the roster so its factors average exactly to the nominal.
  auto normalize = [&s](double Person::*field) {
    double mean = 0.0;
    for (const auto& p : s.persons) mean += p.*field;
    mean /= static_cast<double>(s.persons.size());
    for (auto& p : s.persons) p.*field /= mean;
  };
  normalize(&Person::coding_skill);
  normalize(&Person::inspection_skill);
  normalize(&Person::defect_factor);
  return s;
}

}  // namespace inspsim
