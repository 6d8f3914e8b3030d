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

#include "binpick/hierarchy.hpp"

#include <cmath>
#include <string>

#include "binpick/errors.hpp"

namespace binpick {
namespace {

bool reachable(const ArmModel& model, const Vec2& p) {
  const double r = (p - model.base_position).norm();
  return r <= model.reach() && r >= model.inner_reach();
}

bool is_named(const std::string& region) { return region != kFreeRegion; }

}  // namespace

void validate_plan(const TaskPlan& plan, const World& world,
                   const ArmModel& model) {
  if (plan.waypoints.empty()) throw ConfigError("task plan has no waypoints");
  if (plan.labels.size() != plan.waypoints.size()) {
    throw ConfigError("task plan needs one label per waypoint");
  }
  for (std::size_t k = 0; k < plan.waypoints.size(); ++k) {
    const Target& w = plan.waypoints[k];
    const std::string& label = plan.labels[k];
    const std::string where = "waypoint " + std::to_string(k + 1);
    if (!(w.reach_tolerance > 0.0)) {
      throw ConfigError(where + ": reach tolerance must be > 0");
    }
    if (label != kFreeRegion && !world.regions.contains(label)) {
      throw ConfigError(where + ": unknown region '" + label + "'");
    }
    if (region_of(world, w.position) != label) {
      throw ConfigError(where + ": position is not inside region '" + label +
                        "'");
    }
    if (!reachable(model, w.position)) {
      throw ConfigError(where + ": outside the arm's reachable annulus");
    }
  }
}

std::vector<ExpandedTarget> expand_waypoints(const TaskPlan& plan,
                                             const World& world,
                                             const ArmModel& model,
                                             const Vec2& ee_start,
                                             const ExpansionParams& params) {
  if (plan.waypoints.empty()) throw ConfigError("task plan has no waypoints");
  const double safe_y = world.bin_opening_y + params.clearance_margin;

  std::vector<ExpandedTarget> out;
  auto inject = [&](const Vec2& p, const Target& next, int index) {
    if (!reachable(model, p)) {
      throw ConfigError("injected waypoint before waypoint " +
                        std::to_string(index + 1) + " is unreachable");
    }
    out.push_back({Target{p, next.reach_tolerance}, true, index});
  };

  Vec2 current = ee_start;
  std::string current_region = region_of(world, ee_start);
  for (std::size_t k = 0; k < plan.waypoints.size(); ++k) {
    const Target& next = plan.waypoints[k];
    const int index = static_cast<int>(k);
    if (!reachable(model, next.position)) {
      throw ConfigError("waypoint " + std::to_string(k + 1) +
                        " is outside the arm's reachable annulus");
    }
    const std::string next_region = region_of(world, next.position);

    if (current_region != next_region) {
      if (is_named(current_region)) {
        const Box& here = world.regions.at(current_region);
        const bool straight_up = !is_named(next_region) &&
                                 next.position.x() >= here.min.x() &&
                                 next.position.x() <= here.max.x();
        if (!straight_up) {
          if (current.y() < safe_y) {
            inject(Vec2(current.x(), safe_y), next, index);
          }
          if (next.position.y() < safe_y) {
            inject(Vec2(next.position.x(), safe_y), next, index);
          }
        }
      } else {
        // From free space only a far-off target needs the transit hop.
        const Box& there = world.regions.at(next_region);
        const double offset = std::abs(current.x() - next.position.x());
        if (offset > 0.5 * there.width() && next.position.y() < safe_y) {
          inject(Vec2(next.position.x(), safe_y), next, index);
        }
      }
    }
    out.push_back({next, false, index});
    current = next.position;
    current_region = next_region;
  }
  return out;
}

TaskPlan as_plan(const std::vector<ExpandedTarget>& expanded,
                 const World& world) {
  TaskPlan plan;
  for (const ExpandedTarget& e : expanded) {
    plan.waypoints.push_back(e.target);
    plan.labels.push_back(region_of(world, e.target.position));
  }
  return plan;
}

SupervisorState::SupervisorState(std::vector<ExpandedTarget> expanded,
                                 int original_count,
                                 const SupervisorParams& params,
                                 double start_clock)
    : expanded_(std::move(expanded)),
      outcomes_(original_count),
      params_(params) {
  if (expanded_.empty()) throw ContractViolation("supervisor needs targets");
  enter_group(start_clock);
}

void SupervisorState::enter_group(double clock) {
  deadline_ = clock + params_.budget_s;
}

SupervisorStep SupervisorState::step(const RobotState& robot_state,
                                     const Vec2& ee, double clock) {
  SupervisorStep result;
  if (done()) {
    result.status = SupervisorStatus::kDone;
    return result;
  }

  const ExpandedTarget& active = expanded_[cursor_];
  const bool within = (ee - active.target.position).norm() <=
                      active.target.reach_tolerance;
  const bool settled =
      robot_state.qdot.size() == 0 ||
      robot_state.qdot.lpNorm<Eigen::Infinity>() <= params_.v_settle;

  if (within && settled) {
    const int group = active.original_index;
    if (!active.injected) {
      outcomes_[group] = {true, clock};
      result.reached_original = group;
    }
    ++cursor_;
    if (done()) {
      result.status = SupervisorStatus::kDone;
      return result;
    }
    if (expanded_[cursor_].original_index != group) enter_group(clock);
    result.status = SupervisorStatus::kAdvanced;
    return result;
  }

  if (clock > deadline_) {
    const int group = active.original_index;
    result.status = SupervisorStatus::kTimeout;
    if (params_.failure_mode == FailureMode::kHalt) {
      for (int g = group; g < static_cast<int>(outcomes_.size()); ++g) {
        result.failed_originals.push_back(g);
      }
      cursor_ = expanded_.size();
      return result;
    }
    result.failed_originals.push_back(group);
    while (!done() && expanded_[cursor_].original_index == group) ++cursor_;
    if (!done()) enter_group(clock);
    return result;
  }

  result.status = SupervisorStatus::kRunning;
  return result;
}

SupervisorState flat_supervisor(const TaskPlan& plan,
                                const SupervisorParams& params,
                                double start_clock) {
  std::vector<ExpandedTarget> expanded;
  for (std::size_t k = 0; k < plan.waypoints.size(); ++k) {
    expanded.push_back({plan.waypoints[k], false, static_cast<int>(k)});
  }
  return SupervisorState(std::move(expanded),
                         static_cast<int>(plan.waypoints.size()), params,
                         start_clock);
}

SupervisorState hierarchical_supervisor(const TaskPlan& plan,
                                        const World& world,
                                        const ArmModel& model,
                                        const Vec2& ee_start,
                                        const ExpansionParams& expansion,
                                        const SupervisorParams& params,
                                        double start_clock) {
  return SupervisorState(
      expand_waypoints(plan, world, model, ee_start, expansion),
      static_cast<int>(plan.waypoints.size()), params, start_clock);
}

}  // namespace binpick
