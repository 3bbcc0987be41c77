// Command-line front end: simulation studies, presets, calibration helpers and
// the run service.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "inspsim/calibrate/network.hpp"
#include "inspsim/calibrate/tree.hpp"
#include "inspsim/emit.hpp"
#include "inspsim/experiment.hpp"
#include "inspsim/scenario_io.hpp"
#include "inspsim/service.hpp"
#include "inspsim/simulator.hpp"

namespace fs = std::filesystem;
using namespace inspsim;

namespace {

struct StudyArgs {
  std::string scenario_file;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  std::string out_dir = "results";
  int workers = 1;
};

void add_study_options(CLI::App* cmd, StudyArgs& args) {
  cmd->add_option("scenario", args.scenario_file, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", args.seed, "Override the scenario seed");
  cmd->add_option("--replications", args.replications, "Override the replication count")->check(CLI::PositiveNumber);
  cmd->add_option("--out", args.out_dir, "Output directory")->capture_default_str();
  cmd->add_option("--workers", args.workers, "Concurrent replications")->capture_default_str()->check(CLI::PositiveNumber);
}

Scenario load_with_overrides(const StudyArgs& args) {
  Scenario s = load_scenario(args.scenario_file);
  if (args.seed) s.seed = *args.seed;
  if (args.replications) s.replications = *args.replications;
  return s;
}

void write_traces(const Scenario& s, const fs::path& dir) {
  for (int r = 0; r < s.replications; ++r) {
    Simulator sim(s, r, RunOptions{true});
    sim.run_to_end();
    std::ostringstream csv;
    write_trace_csv(csv, sim.trace());
    write_text_file(dir / ("trace_rep" + std::to_string(r) + ".csv"), csv.str());
  }
}

std::string env_or(const char* name, std::string fallback) {
  const char* value = std::getenv(name);
  return value && *value ? value : fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-event simulation of software projects with code inspections"};
  app.require_subcommand(1);

  StudyArgs sim_args;
  std::optional<std::string> policy_kind;
  std::optional<double> threshold;
  std::optional<int> team_size;
  bool trace = false;
  auto* simulate = app.add_subcommand("simulate", "Run replications of one scenario");
  add_study_options(simulate, sim_args);
  simulate->add_option("--policy", policy_kind, "none | all | density_threshold | size_threshold");
  simulate->add_option("--threshold", threshold, "Density threshold (defects/KLOC) or minimum LOC");
  simulate->add_option("--team-size", team_size, "Inspectors per inspection")->check(CLI::PositiveNumber);
  simulate->add_flag("--trace", trace, "Write one event trace per replication");

  StudyArgs cmp_args;
  bool cmp_trace = false;
  auto* compare = app.add_subcommand("compare", "Compare no / all / density-selected inspections");
  add_study_options(compare, cmp_args);
  compare->add_flag("--trace", cmp_trace, "Write event traces for each variant");

  StudyArgs sweep_args;
  std::string sizes_text = "1..10";
  auto* sweep = app.add_subcommand("sweep", "Sweep the inspection team size");
  add_study_options(sweep, sweep_args);
  sweep->add_option("--sizes", sizes_text, "Team sizes, e.g. 1..10 or 1,2,4")->capture_default_str();

  std::string preset_name;
  std::string preset_out;
  std::uint64_t preset_seed = 2003;
  auto* preset = app.add_subcommand("preset", "Write a named preset scenario");
  preset->add_option("name", preset_name, "table1-policy-comparison | fig3-team-sweep")->required();
  preset->add_option("-o,--output", preset_out, "Destination file (default: stdout)");
  preset->add_option("--seed", preset_seed, "Seed for the generated project")->capture_default_str();

  std::string host = env_or("INSPSIM_HOST", "127.0.0.1");
  int port = std::stoi(env_or("INSPSIM_PORT", "8080"));
  ServiceConfig service_config;
  service_config.store = env_or("INSPSIM_STORE", "inspsim-runs");
  service_config.workers = std::stoi(env_or("INSPSIM_WORKERS", "1"));
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP run service");
  serve_cmd->add_option("--host", host, "Listen address (INSPSIM_HOST)")->capture_default_str();
  serve_cmd->add_option("--port", port, "Listen port (INSPSIM_PORT)")->capture_default_str();
  serve_cmd->add_option("--workers", service_config.workers, "Concurrent runs (INSPSIM_WORKERS)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  serve_cmd->add_option("--store", service_config.store, "Run store directory (INSPSIM_STORE)")->capture_default_str();

  std::string data_file;
  std::string target;
  std::string model_out;
  calibrate::TrainParams train;
  std::string activation = "logistic";
  auto* nn_cmd = app.add_subcommand("nn-train", "Fit a feed-forward network and rank input relevance");
  nn_cmd->add_option("data", data_file, "Delimited data file with header row")->required()->check(CLI::ExistingFile);
  nn_cmd->add_option("--target", target, "Explained variable column")->required();
  nn_cmd->add_option("--units", train.units, "Hidden units")->capture_default_str()->check(CLI::PositiveNumber);
  nn_cmd->add_option("--activation", activation, "logistic | tanh | identity")->capture_default_str();
  nn_cmd->add_option("--learning-rate", train.learning_rate, "Initial step size")->capture_default_str();
  nn_cmd->add_option("--epochs", train.epochs, "Maximum epochs")->capture_default_str();
  nn_cmd->add_option("--seed", train.seed, "Initialization seed")->capture_default_str();
  nn_cmd->add_option("--export", model_out, "Write the fitted model as JSON");
  bool raw = false;
  nn_cmd->add_flag("--raw", raw, "Train on unscaled columns instead of z-scores");

  std::string tree_data;
  std::string tree_target;
  calibrate::TreeParams tree_params;
  auto* tree_cmd = app.add_subcommand("tree-fit", "Grow a regression tree and print it as JSON");
  tree_cmd->add_option("data", tree_data, "Delimited data file with header row")->required()->check(CLI::ExistingFile);
  tree_cmd->add_option("--target", tree_target, "Explained variable column")->required();
  tree_cmd->add_option("--min-leaf", tree_params.min_leaf, "Minimum rows per leaf")->capture_default_str();
  tree_cmd->add_option("--max-depth", tree_params.max_depth, "Maximum depth")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*simulate) {
      Scenario s = load_with_overrides(sim_args);
      if (policy_kind) s.policy.kind = policy_kind_from_string(*policy_kind);
      if (threshold) {
        if (s.policy.kind == PolicyKind::SizeThreshold) {
          s.policy.min_loc = static_cast<int>(*threshold);
        } else {
          s.policy.threshold = *threshold;
        }
      }
      if (team_size) s.policy.team_size = *team_size;
      s = validate_scenario(std::move(s));
      const auto set = run_replications(s, {sim_args.workers});
      emit_single(sim_args.out_dir, set);
      if (trace) write_traces(s, sim_args.out_dir);
      std::cout << to_csv(aggregate_table(set.aggregate));
    } else if (*compare) {
      Scenario s = validate_scenario(load_with_overrides(cmp_args));
      const auto cmp = policy_comparison(s, {cmp_args.workers});
      emit_comparison(cmp_args.out_dir, cmp);
      if (cmp_trace) {
        for (const auto& v : cmp.variants) {
          Scenario vs = s;
          vs.policy = v.policy;
          write_traces(vs, fs::path(cmp_args.out_dir) / ("trace_" + to_string(v.policy.kind)));
        }
      }
      std::cout << to_csv(comparison_table(cmp));
    } else if (*sweep) {
      Scenario s = validate_scenario(load_with_overrides(sweep_args));
      const auto curve = team_size_sweep(s, parse_sizes(sizes_text), {sweep_args.workers});
      emit_sweep(sweep_args.out_dir, curve);
      std::cout << to_csv(sweep_table(curve));
    } else if (*serve_cmd) {
      RunService service(service_config);
      std::cerr << "listening on " << host << ':' << port << " (store " << service_config.store.string() << ", "
                << service_config.workers << " worker(s))\n";
      if (!serve_http(service, host, port)) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
    } else if (*nn_cmd) {
      train.activation = calibrate::activation_from_string(activation);
      const auto data = calibrate::read_dataset_csv(data_file, target);
      const auto scaling = calibrate::fit_scaling(data);
      const auto ds = raw ? data : calibrate::standardize(data, scaling);
      calibrate::TrainReport report;
      const auto net = calibrate::nn_train(ds, train, &report);
      std::cout << "epochs," << report.epochs << "\ninitial_mse," << format_number(report.initial_mse)
                << "\nfinal_mse," << format_number(report.final_mse) << "\n\nrank,variable,mean_abs_relevance\n";
      const auto ranked = calibrate::rank_relevance(net, ds);
      for (std::size_t i = 0; i < ranked.size(); ++i) {
        std::cout << i + 1 << ',' << ranked[i].name << ',' << format_number(ranked[i].mean_abs_relevance) << '\n';
      }
      if (!model_out.empty()) {
        auto doc = calibrate::network_to_json(net);
        doc["variables"] = data.names;
        doc["target"] = data.target;
        if (!raw) {
          doc["scaling"] = {{"x_mean", std::vector<double>(scaling.x_mean.begin(), scaling.x_mean.end())},
                            {"x_sd", std::vector<double>(scaling.x_sd.begin(), scaling.x_sd.end())},
                            {"y_mean", scaling.y_mean},
                            {"y_sd", scaling.y_sd}};
        }
        write_text_file(model_out, doc.dump(2) + "\n");
      }
    } else if (*tree_cmd) {
      const auto ds = calibrate::read_dataset_csv(tree_data, tree_target);
      std::cout << calibrate::tree_to_json(calibrate::fit_tree(ds, tree_params), ds.names).dump(2) << '\n';
    } else if (*preset) {
      if (preset_name != "table1-policy-comparison" && preset_name != "fig3-team-sweep") {
        throw std::invalid_argument("unknown preset '" + preset_name + "'");
      }
      const auto text = scenario_to_json(table1_scenario(preset_seed)).dump(2) + "\n";
      if (preset_out.empty()) {
        std::cout << text;
      } else {
        write_text_file(preset_out, text);
      }
    }
  } catch (const ValidationError& e) {
    std::cerr << "invalid scenario: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
