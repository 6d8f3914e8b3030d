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
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace binpick {

using Vec2 = Eigen::Vector2d;
using JointVector = Eigen::VectorXd;

// Planar serial arm. Joint i rotates link i relative to link i-1; all angles
// accumulate from the +x axis at the base.
struct ArmModel {
  std::vector<double> link_lengths;
  JointVector joint_lower;
  JointVector joint_upper;
  JointVector vel_limit;
  Vec2 base_position = Vec2::Zero();

  int dof() const { return static_cast<int>(link_lengths.size()); }
  double reach() const;
  // Smallest end-effector distance from the base the arm can attain.
  double inner_reach() const;
};

// Throws ConfigError when the model breaks its invariants.
void validate_arm(const ArmModel& model);

// Uniform limits, used by the default config and most tests.
ArmModel make_arm(std::vector<double> link_lengths, double joint_limit,
                  double vel_limit, Vec2 base = Vec2::Zero());

struct RobotState {
  JointVector q;
  JointVector qdot;
  double t = 0.0;
};

struct Control {
  JointVector v_cmd;
};

// N+1 points: base, each joint origin, end effector last.
std::vector<Vec2> forward_kinematics(const ArmModel& model,
                                     const JointVector& q);
// Allocation-free variant for the rollout loop; out.size() must be N+1.
void forward_kinematics(const ArmModel& model, const JointVector& q,
                        std::span<Vec2> out);

Vec2 end_effector(const ArmModel& model, const JointVector& q);

// 2xN position Jacobian of the end effector.
Eigen::Matrix2Xd jacobian(const ArmModel& model, const JointVector& q);
Eigen::Matrix2Xd jacobian_from_points(std::span<const Vec2> points);

// Yoshikawa measure sqrt(det(J J^T)).
double manipulability(const ArmModel& model, const JointVector& q);
double manipulability_from_points(std::span<const Vec2> points);

// Random-search estimate of the largest manipulability inside the joint
// limits. Deterministic for a given seed.
double estimate_max_manipulability(const ArmModel& model, int samples,
                                   std::uint64_t seed);

// Velocity-commanded Euler integrator. Commands are clamped to vel_limit;
// positions are left unclamped.
RobotState step_dynamics(const ArmModel& model, const RobotState& state,
                         const Control& u, double dt);
void step_dynamics_inplace(const ArmModel& model, RobotState& state,
                           const JointVector& v_cmd, double dt);

JointVector clamp_velocity(const ArmModel& model, const JointVector& v);

// Per-joint penetration beyond the limits (zero inside).
JointVector joint_limit_violation(const ArmModel& model, const JointVector& q);

}  // namespace binpick
