#pragma once

// Replication harness and the two standard studies: policy comparison and
// inspection team-size sweep.

#include <cstdint>
#include <string>
#include <vector>

#include "inspsim/domain.hpp"

namespace inspsim {

struct MetricStats {
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
  bool operator==(const MetricStats&) const = default;
};

struct Aggregate {
  int replications = 0;
  std::vector<std::pair<std::string, MetricStats>> metrics;

  const MetricStats& at(const std::string& name) const;
  bool operator==(const Aggregate&) const = default;
};

// Metric names in emission order.
const std::vector<std::string>& metric_names();
double metric_value(const RunResult& run, const std::string& name);

// Runs are reduced in replication order, so the result does not depend on
// which worker finished first.
Aggregate aggregate(const std::vector<RunResult>& runs);

struct ExecOptions {
  int workers = 1;
};

struct ReplicationSet {
  Aggregate aggregate;
  std::vector<RunResult> runs;
};

// Executes scenario.replications seeded runs; replication r draws from streams
// keyed by (scenario.seed, r). Errors are rethrown tagged with the replication.
ReplicationSet run_replications(const Scenario& scenario, ExecOptions exec = {});

struct Variant {
  std::string label;
  InspectionPolicy policy;
  ReplicationSet result;
};

struct Comparison {
  int size_loc = 0;
  std::vector<Variant> variants;
};

// None, All and DensityThreshold(calibration threshold) on identical items,
// persons and seeds; only the policy differs.
Comparison policy_comparison(const Scenario& base, ExecOptions exec = {});

struct SweepPoint {
  int team_size = 0;
  Aggregate aggregate;
};

struct SweepCurve {
  std::vector<SweepPoint> points;
};

SweepCurve team_size_sweep(const Scenario& base, const std::vector<int>& sizes, ExecOptions exec = {});

// Parses "1..10" or "1,2,5".
std::vector<int> parse_sizes(const std::string& text);

// Project of 100 items totaling 25,669 LOC with 20 developers, inspecting all
// items with teams of three.
Scenario table1_scenario(std::uint64_t seed = 2003);
// Item sizes: lognormal draws with the given median and log-sd, rescaled to
// the exact total.
std::vector<int> generate_item_sizes(int count, int total_loc, double median, double sigma_log, std::uint64_t seed);

}  // namespace inspsim
