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

#pragma once

#include <cstdint>
#include <vector>

#include "binpick/config.hpp"
#include "binpick/mppi.hpp"

namespace binpick {

struct WaypointResult {
  bool success = false;
  double time_s = 0.0;  // simulated time from trial start to the reach
  double path_m = 0.0;  // end-effector path length from trial start
};

// Per control step diagnostics, kept only when requested.
struct StepRecord {
  long step = 0;
  double sim_time = 0.0;
  int target_index = 0;  // cursor into the supervisor's expanded list
  Vec2 ee = Vec2::Zero();
  JointVector q;
  StepDiagnostics diagnostics;
};

struct TrialResult {
  int horizon = 0;
  ControlMode mode = ControlMode::kFlat;
  int trial = 0;
  std::vector<WaypointResult> waypoints;
  double elapsed_s = 0.0;
  double traversed_m = 0.0;
  long control_steps = 0;
  long rollout_count = 0;
  double wall_s = 0.0;  // controller compute only
  bool valid = true;
  Vec2 ee_start = Vec2::Zero();
  Vec2 ee_final = Vec2::Zero();
  std::vector<StepRecord> steps;
};

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
  int count = 0;
};

// Mean and population standard deviation; NaN mean when empty.
Stats compute_stats(const std::vector<double>& values);

struct CellSummary {
  int horizon = 0;
  ControlMode mode = ControlMode::kFlat;
  int trials = 0;
  int invalid_trials = 0;
  std::vector<double> success_rate;  // per original waypoint
  std::vector<Stats> time_s;         // among successful reaches
  std::vector<Stats> path_m;
  double mean_step_wall_s = 0.0;
  double p50_step_wall_s = 0.0;
  double p95_step_wall_s = 0.0;
  long rollout_count = 0;
  long control_steps = 0;
};

struct ExperimentResult {
  std::vector<CellSummary> cells;
  std::vector<TrialResult> trials;
  int invalid_trials = 0;
};

struct RunOptions {
  // <= 0: BINPICK_THREADS if set, else the OpenMP default.
  int threads = 0;
  bool record_steps = false;
  Backend backend = Backend::kOpenMP;
};

int resolve_threads(int requested);

std::uint64_t trial_seed(std::uint64_t base_seed, int horizon, ControlMode mode,
                         int trial_index);

TrialResult run_trial(const Scenario& scenario, const ExperimentConfig& config,
                      int horizon, ControlMode mode, int trial_index,
                      const RunOptions& options = {});

// Aggregates the valid trials of one (horizon, mode) cell. Step wall-clock
// percentiles need recorded steps; otherwise they fall back to the mean.
CellSummary summarize_cell(const std::vector<TrialResult>& trials, int horizon,
                           ControlMode mode, int waypoint_count);

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const RunOptions& options = {});

}  // namespace binpick
