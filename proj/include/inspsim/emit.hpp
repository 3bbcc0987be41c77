#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "inspsim/experiment.hpp"

namespace inspsim {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Fixed six-decimal rendering keeps emitted files byte-stable.
std::string format_number(double value);
std::string to_csv(const Table& table);

// One row per metric: metric, mean, sd, min, max, replications.
Table aggregate_table(const Aggregate& agg);
// One row per replication, one column per metric.
Table runs_table(const std::vector<RunResult>& runs);
// One row per policy variant.
Table comparison_table(const Comparison& cmp);
// One row per team size: found, missed, effort, duration means.
Table sweep_table(const SweepCurve& curve);

nlohmann::json aggregate_to_json(const Aggregate& agg);
nlohmann::json summary_json(const ReplicationSet& set);
nlohmann::json summary_json(const Comparison& cmp);
nlohmann::json summary_json(const SweepCurve& curve);

void write_text_file(const std::filesystem::path& path, const std::string& content);

// Result directory layouts. Each writes its table(s) plus summary.json and
// returns the name of the primary table file.
std::string emit_single(const std::filesystem::path& dir, const ReplicationSet& set);
std::string emit_comparison(const std::filesystem::path& dir, const Comparison& cmp);
std::string emit_sweep(const std::filesystem::path& dir, const SweepCurve& curve);

}  // namespace inspsim
