#include "inspsim/emit.hpp"

#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace inspsim {

std::string format_number(double value) {
  auto text = fmt::format("{:.6f}", value);
  if (text == "-0.000000") text.erase(0, 1);
  return text;
}

std::string to_csv(const Table& table) {
  std::string out;
  auto append_row = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  append_row(table.header);
  for (const auto& row : table.rows) append_row(row);
  return out;
}

Table aggregate_table(const Aggregate& agg) {
  Table t{{"metric", "mean", "sd", "min", "max", "replications"}, {}};
  for (const auto& [name, s] : agg.metrics) {
    t.rows.push_back({name, format_number(s.mean), format_number(s.sd), format_number(s.min), format_number(s.max),
                      std::to_string(agg.replications)});
  }
  return t;
}

Table runs_table(const std::vector<RunResult>& runs) {
  Table t;
  t.header.push_back("replication");
  for (const auto& name : metric_names()) t.header.push_back(name);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    std::vector<std::string> row{std::to_string(r)};
    for (const auto& name : metric_names()) row.push_back(format_number(metric_value(runs[r], name)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table comparison_table(const Comparison& cmp) {
  Table t{{"alternative", "size", "defects_coded", "defects_found_inspection", "defects_after_inspection",
           "defects_remaining", "overall_effort", "duration"},
          {}};
  for (const auto& v : cmp.variants) {
    const auto& a = v.result.aggregate;
    t.rows.push_back({v.label, std::to_string(cmp.size_loc), format_number(a.at("defects_coded").mean),
                      format_number(a.at("defects_found_inspection").mean),
                      format_number(a.at("defects_after_inspection").mean),
                      format_number(a.at("defects_remaining").mean), format_number(a.at("total_effort").mean),
                      format_number(a.at("duration").mean)});
  }
  return t;
}

Table sweep_table(const SweepCurve& curve) {
  Table t{{"team_size", "found_defects", "missed_defects", "effort", "duration"}, {}};
  for (const auto& p : curve.points) {
    const auto& a = p.aggregate;
    t.rows.push_back({std::to_string(p.team_size), format_number(a.at("defects_found_inspection").mean),
                      format_number(a.at("defects_missed_inspection").mean), format_number(a.at("total_effort").mean),
                      format_number(a.at("duration").mean)});
  }
  return t;
}

nlohmann::json aggregate_to_json(const Aggregate& agg) {
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [name, s] : agg.metrics) {
    metrics[name] = {{"mean", s.mean}, {"sd", s.sd}, {"min", s.min}, {"max", s.max}};
  }
  return {{"replications", agg.replications}, {"metrics", metrics}};
}

nlohmann::json summary_json(const ReplicationSet& set) {
  return {{"study", "single"}, {"aggregate", aggregate_to_json(set.aggregate)}};
}

nlohmann::json summary_json(const Comparison& cmp) {
  nlohmann::json variants = nlohmann::json::array();
  for (const auto& v : cmp.variants) {
    variants.push_back({{"label", v.label},
                        {"policy", to_string(v.policy.kind)},
                        {"threshold", v.policy.threshold},
                        {"team_size", v.policy.team_size},
                        {"aggregate", aggregate_to_json(v.result.aggregate)}});
  }
  return {{"study", "comparison"}, {"size_loc", cmp.size_loc}, {"variants", variants}};
}

nlohmann::json summary_json(const SweepCurve& curve) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : curve.points) {
    points.push_back({{"team_size", p.team_size}, {"aggregate", aggregate_to_json(p.aggregate)}});
  }
  return {{"study", "sweep"}, {"points", points}};
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string emit_single(const std::filesystem::path& dir, const ReplicationSet& set) {
  write_text_file(dir / "aggregate.csv", to_csv(aggregate_table(set.aggregate)));
  write_text_file(dir / "runs.csv", to_csv(runs_table(set.runs)));
  write_text_file(dir / "summary.json", summary_json(set).dump(2) + "\n");
  return "aggregate.csv";
}

std::string emit_comparison(const std::filesystem::path& dir, const Comparison& cmp) {
  write_text_file(dir / "comparison.csv", to_csv(comparison_table(cmp)));
  write_text_file(dir / "summary.json", summary_json(cmp).dump(2) + "\n");
  return "comparison.csv";
}

std::string emit_sweep(const std::filesystem::path& dir, const SweepCurve& curve) {
  write_text_file(dir / "sweep.csv", to_csv(sweep_table(curve)));
  write_text_file(dir / "summary.json", summary_json(curve).dump(2) + "\n");
  return "sweep.csv";
}

}  // namespace inspsim
