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

#include "binpick/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "binpick/errors.hpp"

namespace binpick {

void validate_weights(const CostWeights& w) {
  const double all[] = {w.alpha_p, w.alpha_s, w.alpha_j, w.alpha_m, w.alpha_c};
  bool any_positive = false;
  for (double a : all) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw ConfigError("cost weights must be finite and nonnegative");
    }
    any_positive = any_positive || a > 0.0;
  }
  if (!any_positive) throw ConfigError("at least one cost weight must be > 0");
}

void validate_params(const CostParams& p) {
  if (!(p.d_safe > 0.0)) throw ConfigError("d_safe must be > 0");
  if (!(p.k_pen >= 0.0)) throw ConfigError("k_pen must be >= 0");
  if (!(p.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(p.joint_margin >= 0.0)) throw ConfigError("joint_margin must be >= 0");
  if (!(p.manip_ceiling > 0.0)) throw ConfigError("manip_ceiling must be > 0");
  if (!(p.stop_decel > 0.0)) throw ConfigError("stop_decel must be > 0");
  if (!(p.link_radius >= 0.0)) throw ConfigError("link_radius must be >= 0");
  if (p.samples_per_link < 2) {
    throw ConfigError("samples_per_link must be >= 2");
  }
}

double weighted_total(const CostBreakdown& t, const CostWeights& w) {
  return w.alpha_p * t.pose + w.alpha_s * t.stop + w.alpha_j * t.joint +
         w.alpha_m * t.manip + w.alpha_c * (t.self_coll + t.env_coll);
}

double pose_cost(const Vec2& ee, const Target& target) {
  return (ee - target.position).norm();
}

double stop_cost(const RobotState& state, int steps_remaining, double dt,
                 const CostParams& params) {
  if (steps_remaining < 0) {
    throw ContractViolation("steps_remaining must be >= 0");
  }
  const double stoppable = steps_remaining * params.stop_decel * dt;
  double cost = 0.0;
  for (Eigen::Index i = 0; i < state.qdot.size(); ++i) {
    cost += std::max(0.0, std::abs(state.qdot[i]) - stoppable);
  }
  return cost;
}

double joint_cost(const ArmModel& model, const JointVector& q,
                  const CostParams& params) {
  if (q.size() != model.dof()) {
    throw ContractViolation("joint vector size does not match arm");
  }
  const double m = params.joint_margin;
  double cost = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const double dist = std::min(q[i] - model.joint_lower[i],
                                 model.joint_upper[i] - q[i]);
    if (dist < 0.0) {
      // Penetrating: barrier saturates at margin^2.
      cost += dist * dist + m * m;
    } else if (dist < m) {
      cost += (m - dist) * (m - dist);
    }
  }
  return cost;
}

double manip_cost_from_measure(double mu, const CostParams& params) {
  const double raw =
      1.0 / (mu + params.epsilon) - 1.0 / (params.mu_max + params.epsilon);
  return std::clamp(raw, 0.0, params.manip_ceiling);
}

double manip_cost(const ArmModel& model, const JointVector& q,
                  const CostParams& params) {
  return manip_cost_from_measure(manipulability(model, q), params);
}

double collision_hinge(double d, const CostParams& params) {
  if (d >= params.d_safe) return 0.0;
  if (d >= 0.0) {
    const double r = (params.d_safe - d) / params.d_safe;
    return r * r;
  }
  return 1.0 + std::abs(d) * params.k_pen;
}

double env_coll_cost(const World& world, const ArmModel& model,
                     const JointVector& q, const CostParams& params) {
  return collision_hinge(
      arm_clearance(world, model, q, params.samples_per_link), params);
}

double segment_distance(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                        const Vec2& b1) {
  auto cross = [](const Vec2& u, const Vec2& v) {
    return u.x() * v.y() - u.y() * v.x();
  };
  const Vec2 da = a1 - a0;
  const Vec2 db = b1 - b0;
  // Proper crossing.
  const double d1 = cross(db, a0 - b0);
  const double d2 = cross(db, a1 - b0);
  const double d3 = cross(da, b0 - a0);
  const double d4 = cross(da, b1 - a0);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return 0.0;
  }
  auto point_seg = [](const Vec2& p, const Vec2& s0, const Vec2& s1) {
    const Vec2 d = s1 - s0;
    const double len2 = d.squaredNorm();
    const double t =
        len2 > 0.0 ? std::clamp((p - s0).dot(d) / len2, 0.0, 1.0) : 0.0;
    return (p - (s0 + t * d)).norm();
  };
  return std::min({point_seg(a0, b0, b1), point_seg(a1, b0, b1),
                   point_seg(b0, a0, a1), point_seg(b1, a0, a1)});
}

double self_clearance(std::span<const Vec2> points, double link_radius) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t links = points.size() - 1;
  for (std::size_t i = 0; i < links; ++i) {
    for (std::size_t j = i + 2; j < links; ++j) {
      best = std::min(best, segment_distance(points[i], points[i + 1],
                                             points[j], points[j + 1]) -
                                2.0 * link_radius);
    }
  }
  return best;
}

double self_coll_cost(const ArmModel& model, const JointVector& q,
                      const CostParams& params) {
  const auto points = forward_kinematics(model, q);
  return collision_hinge(self_clearance(points, params.link_radius), params);
}

CostBreakdown total_cost(const CostContext& ctx, const RobotState& state,
                         const Control& /*u*/, std::span<const Vec2> points,
                         const Target& target, int steps_remaining,
                         double* env_clearance) {
  const CostParams& p = *ctx.params;
  CostBreakdown c;
  c.pose = pose_cost(points.back(), target);
  c.stop = stop_cost(state, steps_remaining, ctx.dt, p);
  c.joint = joint_cost(*ctx.model, state.q, p);
  c.manip = manip_cost_from_measure(manipulability_from_points(points), p);
  c.self_coll = collision_hinge(self_clearance(points, p.link_radius), p);
  const double clearance =
      arm_clearance_from_points(*ctx.world, points, p.samples_per_link);
  c.env_coll = collision_hinge(clearance, p);
  if (env_clearance != nullptr) *env_clearance = clearance;
  c.total = weighted_total(c, *ctx.weights);
  return c;
}

CostBreakdown total_cost(const CostContext& ctx, const RobotState& state,
                         const Control& u, const Target& target,
                         int steps_remaining) {
  const auto points = forward_kinematics(*ctx.model, state.q);
  return total_cost(ctx, state, u, points, target, steps_remaining);
}

}  // namespace binpick
