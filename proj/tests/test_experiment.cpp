#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <fstream>
#include <random>
#include <sstream>

#include "generators.hpp"
#include "inspsim/emit.hpp"
#include "inspsim/experiment.hpp"
#include "inspsim/simulator.hpp"

using namespace inspsim;
using namespace inspsim::testing;
namespace fs = std::filesystem;

namespace {

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("inspsim-test-" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("a single replication aggregates to itself") {
  Scenario s = validate_scenario(small_scenario(6, 4));
  s.replications = 1;
  const auto set = run_replications(s);
  REQUIRE(set.runs.size() == 1);
  for (const auto& name : metric_names()) {
    const auto& m = set.aggregate.at(name);
    CHECK(m.mean == metric_value(set.runs[0], name));
    CHECK(m.sd == 0.0);
    CHECK(m.min == m.max);
  }
}

TEST_CASE("aggregates are deterministic and bounded") {
  Scenario s = validate_scenario(small_scenario(10, 5, 77));
  s.replications = 20;
  const auto a = run_replications(s);
  const auto b = run_replications(s, {4});
  CHECK(a.aggregate == b.aggregate);
  CHECK(a.runs == b.runs);
  CHECK(a.aggregate.replications == 20);
  for (const auto& [name, m] : a.aggregate.metrics) {
    CHECK(m.mean >= m.min);
    CHECK(m.mean <= m.max);
    CHECK(m.sd >= 0.0);
  }
}

TEST_CASE("aggregate matches an independent reduction") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<RunResult> runs(2 + rng() % 10);
    for (auto& r : runs) {
      r.total_effort = static_cast<double>(rng() % 10000) / 7.0;
      r.defects_coded = static_cast<int>(rng() % 500);
    }
    const Aggregate agg = aggregate(runs);
    double sum = 0.0;
    for (const auto& r : runs) sum += r.total_effort;
    const double mean = sum / runs.size();
    double ss = 0.0;
    for (const auto& r : runs) ss += (r.total_effort - mean) * (r.total_effort - mean);
    CHECK(agg.at("total_effort").mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(agg.at("total_effort").sd == doctest::Approx(std::sqrt(ss / (runs.size() - 1))).epsilon(1e-12));
    // Replication order must not matter beyond floating-point reassociation.
    std::vector<RunResult> reversed(runs.rbegin(), runs.rend());
    CHECK(aggregate(reversed).at("defects_coded").mean == agg.at("defects_coded").mean);
  }
}

TEST_CASE("replication errors name the replication") {
  Scenario s = small_scenario(2, 3);
  s.replications = 2;
  s.calibration.distribution_table.clear();
  try {
    run_replications(s);
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("replication") != std::string::npos);
  }
}

TEST_CASE("comparison keeps end quality and coded defects fixed") {
  Scenario s = validate_scenario(small_scenario(20, 6, 5));
  s.replications = 5;
  const auto cmp = policy_comparison(s);
  REQUIRE(cmp.variants.size() == 3);
  CHECK(cmp.variants[0].policy.kind == PolicyKind::None);
  CHECK(cmp.variants[1].policy.kind == PolicyKind::All);
  CHECK(cmp.variants[2].policy.kind == PolicyKind::DensityThreshold);
  for (int r = 0; r < 5; ++r) {
    const auto idx = static_cast<std::size_t>(r);
    CHECK(cmp.variants[0].result.runs[idx].defects_remaining == cmp.variants[1].result.runs[idx].defects_remaining);
    CHECK(cmp.variants[0].result.runs[idx].defects_remaining == cmp.variants[2].result.runs[idx].defects_remaining);
    CHECK(cmp.variants[0].result.runs[idx].defects_coded == cmp.variants[1].result.runs[idx].defects_coded);
  }
  const auto table = comparison_table(cmp);
  CHECK(table.rows.size() == 3);
  const auto csv = to_csv(table);
  CHECK(csv.rfind("alternative,size,defects_coded,", 0) == 0);
  CHECK(line_count(csv) == 4);
}

TEST_CASE("sweep emits one row per size") {
  Scenario s = validate_scenario(small_scenario(8, 12, 3));
  s.replications = 2;
  const auto curve = team_size_sweep(s, parse_sizes("1..10"));
  REQUIRE(curve.points.size() == 10);
  const auto table = sweep_table(curve);
  CHECK(table.header == std::vector<std::string>{"team_size", "found_defects", "missed_defects", "effort", "duration"});
  CHECK(line_count(to_csv(table)) == 11);

  Scenario none = s;
  none.policy.kind = PolicyKind::None;
  CHECK_THROWS(team_size_sweep(none, {1, 2}));
  CHECK_THROWS_AS(team_size_sweep(s, {12}), ValidationError);
}

TEST_CASE("size lists parse") {
  CHECK(parse_sizes("1..4") == std::vector<int>{1, 2, 3, 4});
  CHECK(parse_sizes("2,5,9") == std::vector<int>{2, 5, 9});
  CHECK_THROWS(parse_sizes("4..1"));
  CHECK_THROWS(parse_sizes("x"));
}

TEST_CASE("an empty table renders as its header") {
  Table t{{"metric", "mean"}, {}};
  CHECK(to_csv(t) == "metric,mean\n");
  CHECK(to_csv(aggregate_table(Aggregate{})) == "metric,mean,sd,min,max,replications\n");
}

TEST_CASE("numbers render with six decimals") {
  CHECK(format_number(1.0) == "1.000000");
  CHECK(format_number(-0.0) == "0.000000");
  CHECK(format_number(-1e-9) == "0.000000");
  CHECK(format_number(2.5e-7) == "0.000000");
  CHECK(format_number(1234.567891) == "1234.567891");
  CHECK(format_number(-2.5) == "-2.500000");
}

TEST_CASE("emitted files are byte-identical across invocations and worker counts") {
  Scenario s = validate_scenario(small_scenario(15, 6, 12));
  s.replications = 6;
  const auto d1 = scratch_dir("emit1");
  const auto d2 = scratch_dir("emit2");
  emit_comparison(d1, policy_comparison(s, {1}));
  emit_comparison(d2, policy_comparison(s, {3}));
  for (const auto* f : {"comparison.csv", "summary.json"}) {
    std::ifstream a(d1 / f), b(d2 / f);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK_FALSE(sa.str().empty());
  }
  CHECK_THROWS(write_text_file("/proc/forbidden/x.csv", "x"));
}

TEST_CASE("generated item sizes hit the exact total") {
  const auto sizes = generate_item_sizes(100, 25669, 200.0, 0.6, 2003);
  REQUIRE(sizes.size() == 100);
  CHECK(std::accumulate(sizes.begin(), sizes.end(), 0) == 25669);
  for (int v : sizes) CHECK(v >= 1);
  const Scenario t = table1_scenario();
  CHECK(t.items.size() == 100);
  CHECK(t.persons.size() == 20);
  CHECK(t.total_loc() == 25669);
  CHECK(t.replications == 20);
  CHECK(t.calibration.target_defect_density == 1.5);
}
