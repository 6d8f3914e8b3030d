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

#include <span>

#include "binpick/kinematics.hpp"
#include "binpick/world.hpp"

namespace binpick {

struct CostWeights {
  double alpha_p = 10.0;   // pose
  double alpha_s = 1.0;    // stop
  double alpha_j = 50.0;   // joint limits
  double alpha_m = 0.1;    // manipulability
  double alpha_c = 100.0;  // self + environment collision
};

void validate_weights(const CostWeights& w);

// Shape constants of the individual terms.
struct CostParams {
  double d_safe = 0.02;        // m, collision hinge onset
  double k_pen = 10.0;         // 1/m, penetration slope
  double epsilon = 1e-4;       // manipulability regulariser
  double joint_margin = 0.1;   // rad, soft barrier width
  double manip_ceiling = 100;  // c_max
  double stop_decel = 2.0;     // rad/s^2, a_max
  double link_radius = 0.01;   // m, capsule radius for self collision
  int samples_per_link = 8;
  // Largest manipulability of the arm; estimated once per scenario.
  double mu_max = 1.0;
};

void validate_params(const CostParams& p);

struct CostBreakdown {
  double pose = 0.0;
  double stop = 0.0;
  double joint = 0.0;
  double manip = 0.0;
  double self_coll = 0.0;
  double env_coll = 0.0;
  double total = 0.0;
};

struct Target {
  Vec2 position = Vec2::Zero();
  double reach_tolerance = 0.02;
};

double weighted_total(const CostBreakdown& terms, const CostWeights& w);

double pose_cost(const Vec2& ee, const Target& target);

double stop_cost(const RobotState& state, int steps_remaining, double dt,
                 const CostParams& params);

double joint_cost(const ArmModel& model, const JointVector& q,
                  const CostParams& params);

double manip_cost(const ArmModel& model, const JointVector& q,
                  const CostParams& params);
double manip_cost_from_measure(double manipulability, const CostParams& params);

// Quadratic inside the safety band, 1 + k_pen * depth once penetrating.
double collision_hinge(double clearance, const CostParams& params);

double env_coll_cost(const World& world, const ArmModel& model,
                     const JointVector& q, const CostParams& params);

// Minimum capsule clearance between non-adjacent links; +inf when there are
// no such pairs.
double self_clearance(std::span<const Vec2> points, double link_radius);
double segment_distance(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                        const Vec2& b1);

double self_coll_cost(const ArmModel& model, const JointVector& q,
                      const CostParams& params);

// All six terms plus the weighted total. `points` are the FK points of
// state.q; the `u` argument is accepted for the x_t/u_t signature although no
// term currently depends on the raw command beyond state.qdot.
struct CostContext {
  const ArmModel* model;
  const World* world;
  const CostWeights* weights;
  const CostParams* params;
  double dt;
};

CostBreakdown total_cost(const CostContext& ctx, const RobotState& state,
                         const Control& u, std::span<const Vec2> points,
                         const Target& target, int steps_remaining,
                         double* env_clearance = nullptr);
CostBreakdown total_cost(const CostContext& ctx, const RobotState& state,
                         const Control& u, const Target& target,
                         int steps_remaining);

}  // namespace binpick
