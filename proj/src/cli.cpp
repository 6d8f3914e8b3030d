// Copyright 2026 The binpick Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "binpick/cli.hpp"

#include <algorithm>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "binpick/bench.hpp"
#include "binpick/config.hpp"
#include "binpick/errors.hpp"
#include "binpick/results_io.hpp"

namespace binpick {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw ConfigError("not an integer: " + item);
    out.push_back(value);
  }
  if (out.empty()) throw ConfigError("empty list: '" + text + "'");
  return out;
}

std::vector<ControlMode> parse_mode_list(const std::string& text) {
  std::vector<ControlMode> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_mode(item));
  }
  if (out.empty()) throw ConfigError("empty mode list");
  return out;
}

void print_summary(const ExperimentResult& result, std::ostream& out) {
  out << std::fixed << std::setprecision(2);
  for (const CellSummary& c : result.cells) {
    out << "H=" << std::setw(3) << c.horizon << ' ' << std::setw(12)
        << to_string(c.mode) << "  success:";
    for (double r : c.success_rate) out << ' ' << r;
    out << "  step_ms=" << std::setprecision(3) << c.mean_step_wall_s * 1e3
        << std::setprecision(2) << '\n';
  }
  if (result.invalid_trials > 0) {
    out << result.invalid_trials << " invalid trial(s) excluded\n";
  }
}

struct RunArgs {
  std::string config = BINPICK_DEFAULT_CONFIG;
  std::string horizons;
  std::string modes;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "results";
  int threads = 0;
  bool steps = false;
};

struct DemoArgs {
  std::string config = BINPICK_DEFAULT_CONFIG;
  std::optional<int> horizon;
  std::string mode = "flat";
  int trial = 0;
  std::optional<std::uint64_t> seed;
};

int do_run(const RunArgs& a, std::ostream& out) {
  ExperimentConfig config = load_config(a.config);
  if (!a.horizons.empty()) config.horizons = parse_int_list(a.horizons);
  if (!a.modes.empty()) config.modes = parse_mode_list(a.modes);
  if (a.trials) config.trials = *a.trials;
  if (a.seed) config.base_seed = *a.seed;
  validate_config(config);
  build_scenario(config);  // surface geometry errors before running

  RunOptions options;
  options.threads = a.threads;
  options.record_steps = a.steps;
  const ExperimentResult result = run_experiment(config, options);
  write_results(result, config, a.out_dir, a.steps);
  out << "ran " << result.trials.size() << " trial(s), wrote " << a.out_dir
      << '\n';
  print_summary(result, out);
  return kExitOk;
}

int do_validate(const std::string& path, std::ostream& out,
                std::ostream& err) {
  const ExperimentConfig config = load_config(path);
  const World world = build_bin_array(config.world);
  const auto problems = audit_world(world);
  for (const auto& p : problems) err << "geometry: " << p << '\n';
  if (!problems.empty()) return kExitConfig;
  const Scenario scenario = build_scenario(config);
  const auto expanded =
      expand_waypoints(scenario.plan, scenario.world, scenario.model,
                       scenario.ee_start, config.expansion);
  out << "config ok: " << world.obstacles.size() << " obstacles, "
      << world.regions.size() << " regions, "
      << scenario.plan.waypoints.size() << " waypoints ("
      << expanded.size() << " with hierarchy), mu_max="
      << scenario.params.mu_max << '\n';
  return kExitOk;
}

int do_demo(const DemoArgs& a, std::ostream& out) {
  ExperimentConfig config = load_config(a.config);
  if (a.seed) config.base_seed = *a.seed;
  const int horizon = a.horizon.value_or(config.horizons.front());
  const ControlMode mode = parse_mode(a.mode);
  MpcConfig probe = config.mpc;
  probe.horizon = horizon;
  validate_mpc(probe);
  const Scenario scenario = build_scenario(config);

  RunOptions options;
  options.record_steps = true;
  const TrialResult t =
      run_trial(scenario, config, horizon, mode, a.trial, options);
  for (const StepRecord& r : t.steps) {
    const StepDiagnostics& d = r.diagnostics;
    nlohmann::json line = {{"step", r.step},
                           {"t", r.sim_time},
                           {"target", r.target_index},
                           {"ee", {r.ee.x(), r.ee.y()}},
                           {"q", std::vector<double>(r.q.data(),
                                                     r.q.data() + r.q.size())},
                           {"best_cost", d.best_cost},
                           {"nominal_cost", d.nominal_cost},
                           {"entropy", d.weight_entropy},
                           {"rollouts", d.rollout_count},
                           {"degenerate", d.degenerate},
                           {"wall_s", d.wall_seconds}};
    out << line.dump() << '\n';
  }
  nlohmann::json summary = {{"horizon", horizon},
                            {"mode", to_string(mode)},
                            {"trial", a.trial},
                            {"valid", t.valid},
                            {"elapsed_s", t.elapsed_s},
                            {"traversed_m", t.traversed_m},
                            {"control_steps", t.control_steps}};
  nlohmann::json wps = nlohmann::json::array();
  for (const WaypointResult& w : t.waypoints) {
    wps.push_back({{"success", w.success},
                   {"time_s", w.time_s},
                   {"path_m", w.path_m}});
  }
  summary["waypoints"] = wps;
  out << summary.dump() << '\n';
  return t.valid ? kExitOk : kExitRuntime;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Sampling-based MPC bin-picking benchmark", "binpick_cli"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run the horizon x mode experiment");
  run->add_option("--config", run_args.config, "Experiment config (JSON)");
  run->add_option("--horizons", run_args.horizons,
                  "Comma-separated horizon override, e.g. 20,40");
  run->add_option("--modes", run_args.modes,
                  "Comma-separated subset of flat,hierarchical");
  run->add_option("--trials", run_args.trials, "Trials per cell");
  run->add_option("--seed", run_args.seed, "Base seed override");
  run->add_option("--out", run_args.out_dir, "Output directory");
  run->add_option("--threads", run_args.threads, "Worker threads (0 = auto)");
  run->add_flag("--steps", run_args.steps, "Also write steps.csv");

  std::string validate_path = BINPICK_DEFAULT_CONFIG;
  auto* validate =
      app.add_subcommand("validate", "Parse a config and audit its geometry");
  validate->add_option("--config", validate_path, "Experiment config (JSON)");

  DemoArgs demo_args;
  auto* demo = app.add_subcommand(
      "demo", "Run one trial and stream per-step diagnostics as JSON lines");
  demo->add_option("--config", demo_args.config, "Experiment config (JSON)");
  demo->add_option("--horizon", demo_args.horizon, "MPC horizon (steps)");
  demo->add_option("--mode", demo_args.mode, "flat or hierarchical");
  demo->add_option("--trial", demo_args.trial, "Trial index (seed stream)");
  demo->add_option("--seed", demo_args.seed, "Base seed override");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << app.help();
    return kExitConfig;
  }

  try {
    if (*run) return do_run(run_args, out);
    if (*validate) return do_validate(validate_path, out, err);
    if (*demo) return do_demo(demo_args, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ContractViolation& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace binpick
