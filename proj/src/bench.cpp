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

#include "binpick/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

#include <omp.h>

#include "binpick/errors.hpp"
#include "binpick/hierarchy.hpp"

namespace binpick {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BINPICK_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return omp_get_max_threads();
}

std::uint64_t trial_seed(std::uint64_t base_seed, int horizon, ControlMode mode,
                         int trial_index) {
  std::uint64_t s = mix_seed(base_seed, static_cast<std::uint64_t>(horizon));
  s = mix_seed(s, mode == ControlMode::kFlat ? 0 : 1);
  return mix_seed(s, static_cast<std::uint64_t>(trial_index));
}

Stats compute_stats(const std::vector<double>& values) {
  Stats s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) {
    s.mean = std::numeric_limits<double>::quiet_NaN();
    s.stddev = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / s.count;
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(var / s.count);
  return s;
}

TrialResult run_trial(const Scenario& scenario, const ExperimentConfig& config,
                      int horizon, ControlMode mode, int trial_index,
                      const RunOptions& options) {
  MpcConfig mpc = config.mpc;
  mpc.horizon = horizon;
  mpc.seed = trial_seed(config.base_seed, horizon, mode, trial_index);

  const ControlProblem problem{scenario.model, scenario.world,
                               scenario.weights, scenario.params};
  MppiController controller(problem, mpc, options.backend,
                            resolve_threads(options.threads));

  const int originals = static_cast<int>(scenario.plan.waypoints.size());
  SupervisorState supervisor =
      mode == ControlMode::kFlat
          ? flat_supervisor(scenario.plan, config.supervisor)
          : hierarchical_supervisor(scenario.plan, scenario.world,
                                    scenario.model, scenario.ee_start,
                                    config.expansion, config.supervisor);

  TrialResult result;
  result.horizon = horizon;
  result.mode = mode;
  result.trial = trial_index;
  result.waypoints.resize(originals);

  RobotState state;
  state.q = scenario.start_q;
  state.qdot = JointVector::Zero(scenario.model.dof());
  state.t = 0.0;
  Vec2 ee = end_effector(scenario.model, state.q);
  result.ee_start = ee;

  // Every original waypoint can consume at most one budget.
  const long max_steps =
      static_cast<long>(std::ceil(originals * config.supervisor.budget_s /
                                  mpc.dt)) +
      originals + 1;

  while (true) {
    const SupervisorStep s = supervisor.step(state, ee, state.t);
    if (s.reached_original) {
      result.waypoints[*s.reached_original] = {true, state.t,
                                               result.traversed_m};
    }
    if (supervisor.done() || result.control_steps >= max_steps) break;

    const int cursor = static_cast<int>(supervisor.cursor());
    const StepOutput out = controller.control_step(state, supervisor.active());
    step_dynamics_inplace(scenario.model, state, out.command.v_cmd, mpc.dt);
    const Vec2 next_ee = end_effector(scenario.model, state.q);
    if (!state.q.allFinite() || !next_ee.allFinite()) {
      result.valid = false;
      break;
    }
    result.traversed_m += (next_ee - ee).norm();
    ee = next_ee;
    ++result.control_steps;
    result.rollout_count += out.diagnostics.rollout_count;
    result.wall_s += out.diagnostics.wall_seconds;
    if (options.record_steps) {
      result.steps.push_back(
          {result.control_steps, state.t, cursor, ee, state.q, out.diagnostics});
    }
  }
  result.elapsed_s = state.t;
  result.ee_final = ee;
  return result;
}

CellSummary summarize_cell(const std::vector<TrialResult>& trials, int horizon,
                           ControlMode mode, int waypoint_count) {
  CellSummary cell;
  cell.horizon = horizon;
  cell.mode = mode;
  std::vector<std::vector<double>> times(waypoint_count), paths(waypoint_count);
  std::vector<int> hits(waypoint_count, 0);
  std::vector<double> step_walls;
  double wall_total = 0.0;
  for (const TrialResult& t : trials) {
    if (t.horizon != horizon || t.mode != mode) continue;
    if (!t.valid) {
      ++cell.invalid_trials;
      continue;
    }
    ++cell.trials;
    for (int k = 0; k < waypoint_count; ++k) {
      const WaypointResult& w = t.waypoints[k];
      if (!w.success) continue;
      ++hits[k];
      times[k].push_back(w.time_s);
      paths[k].push_back(w.path_m);
    }
    cell.rollout_count += t.rollout_count;
    cell.control_steps += t.control_steps;
    wall_total += t.wall_s;
    for (const StepRecord& r : t.steps) {
      step_walls.push_back(r.diagnostics.wall_seconds);
    }
  }
  for (int k = 0; k < waypoint_count; ++k) {
    // Sorting makes the aggregates independent of trial order.
    std::sort(times[k].begin(), times[k].end());
    std::sort(paths[k].begin(), paths[k].end());
    cell.success_rate.push_back(
        cell.trials > 0 ? static_cast<double>(hits[k]) / cell.trials : 0.0);
    cell.time_s.push_back(compute_stats(times[k]));
    cell.path_m.push_back(compute_stats(paths[k]));
  }
  cell.mean_step_wall_s =
      cell.control_steps > 0 ? wall_total / cell.control_steps : 0.0;
  if (step_walls.empty()) {
    cell.p50_step_wall_s = cell.p95_step_wall_s = cell.mean_step_wall_s;
  } else {
    std::sort(step_walls.begin(), step_walls.end());
    auto pct = [&](double q) {
      const auto idx = static_cast<std::size_t>(
          std::floor(q * static_cast<double>(step_walls.size() - 1)));
      return step_walls[idx];
    };
    cell.p50_step_wall_s = pct(0.5);
    cell.p95_step_wall_s = pct(0.95);
  }
  return cell;
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const RunOptions& options) {
  const Scenario scenario = build_scenario(config);

  struct Job {
    int horizon;
    ControlMode mode;
    int trial;
  };
  std::vector<Job> jobs;
  for (int h : config.horizons) {
    for (ControlMode m : config.modes) {
      for (int t = 0; t < config.trials; ++t) jobs.push_back({h, m, t});
    }
  }

  ExperimentResult result;
  result.trials.resize(jobs.size());
  const int threads = resolve_threads(options.threads);
  RunOptions inner = options;
  // Trials take the threads; rollouts inside each trial run serially.
  inner.threads = 1;
  const long n_jobs = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) \
    if (threads > 1)
  for (long j = 0; j < n_jobs; ++j) {
    const Job& job = jobs[j];
    result.trials[j] =
        run_trial(scenario, config, job.horizon, job.mode, job.trial, inner);
  }

  const int waypoint_count = static_cast<int>(config.plan.waypoints.size());
  for (int h : config.horizons) {
    for (ControlMode m : config.modes) {
      result.cells.push_back(summarize_cell(result.trials, h, m,
                                            waypoint_count));
      result.invalid_trials += result.cells.back().invalid_trials;
    }
  }
  return result;
}

}  // namespace binpick
