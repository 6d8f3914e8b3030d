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

#include <optional>
#include <string>
#include <vector>

#include "binpick/cost.hpp"
#include "binpick/kinematics.hpp"
#include "binpick/world.hpp"

namespace binpick {

struct TaskPlan {
  std::vector<Target> waypoints;
  // Region name per waypoint: "bin_k", "tote" or "free".
  std::vector<std::string> labels;
};

// Checks the plan against the world: nonempty, labels match the region each
// waypoint actually lies in, and every waypoint is inside the arm's reach.
void validate_plan(const TaskPlan& plan, const World& world,
                   const ArmModel& model);

struct ExpansionParams {
  double clearance_margin = 0.05;  // m above bin_opening_y
};

struct ExpandedTarget {
  Target target;
  bool injected = false;
  int original_index = 0;  // the original waypoint this entry leads to
};

// Heuristic high-level policy: routes the end effector over bin walls by
// inserting a retract point above the current position and a transit point
// above the next target whenever consecutive waypoints sit in different
// regions.
std::vector<ExpandedTarget> expand_waypoints(const TaskPlan& plan,
                                             const World& world,
                                             const ArmModel& model,
                                             const Vec2& ee_start,
                                             const ExpansionParams& params);

// Expanded targets as a plain TaskPlan, labelled by region.
TaskPlan as_plan(const std::vector<ExpandedTarget>& expanded,
                 const World& world);

enum class FailureMode { kContinue, kHalt };

struct SupervisorParams {
  double v_settle = 0.1;  // rad/s, max |qdot| to count a reach
  double budget_s = 12.0;  // per original waypoint, shared with its helpers
  FailureMode failure_mode = FailureMode::kContinue;
};

enum class SupervisorStatus { kRunning, kAdvanced, kTimeout, kDone };

struct WaypointOutcome {
  bool success = false;
  double time_s = 0.0;  // simulated clock at reach
};

struct SupervisorStep {
  SupervisorStatus status = SupervisorStatus::kRunning;
  // Original waypoint completed during this step, if any.
  std::optional<int> reached_original;
  // Original waypoints given up during this step.
  std::vector<int> failed_originals;
};

class SupervisorState {
 public:
  SupervisorState(std::vector<ExpandedTarget> expanded, int original_count,
                  const SupervisorParams& params, double start_clock = 0.0);

  SupervisorStep step(const RobotState& robot_state, const Vec2& ee,
                      double clock);

  bool done() const { return cursor_ >= expanded_.size(); }
  const Target& active() const { return expanded_.at(cursor_).target; }
  std::size_t cursor() const { return cursor_; }
  double deadline() const { return deadline_; }
  const std::vector<ExpandedTarget>& expanded() const { return expanded_; }
  const std::vector<WaypointOutcome>& outcomes() const { return outcomes_; }

 private:
  void enter_group(double clock);

  std::vector<ExpandedTarget> expanded_;
  std::vector<WaypointOutcome> outcomes_;
  SupervisorParams params_;
  std::size_t cursor_ = 0;
  double deadline_ = 0.0;
};

SupervisorState flat_supervisor(const TaskPlan& plan,
                                const SupervisorParams& params,
                                double start_clock = 0.0);

SupervisorState hierarchical_supervisor(const TaskPlan& plan,
                                        const World& world,
                                        const ArmModel& model,
                                        const Vec2& ee_start,
                                        const ExpansionParams& expansion,
                                        const SupervisorParams& params,
                                        double start_clock = 0.0);

}  // namespace binpick
