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

#include "binpick/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "binpick/errors.hpp"

namespace binpick {
namespace {

void check_dims(const ArmModel& model, const JointVector& q) {
  if (q.size() != model.dof()) {
    throw ContractViolation("joint vector has " + std::to_string(q.size()) +
                            " entries, arm has " +
                            std::to_string(model.dof()) + " joints");
  }
}

Vec2 rot90(const Vec2& v) { return Vec2(-v.y(), v.x()); }

}  // namespace

double ArmModel::reach() const {
  return std::accumulate(link_lengths.begin(), link_lengths.end(), 0.0);
}

double ArmModel::inner_reach() const {
  if (link_lengths.empty()) return 0.0;
  const double longest =
      *std::max_element(link_lengths.begin(), link_lengths.end());
  return std::max(0.0, 2.0 * longest - reach());
}

void validate_arm(const ArmModel& model) {
  const int n = model.dof();
  if (n < 2) throw ConfigError("arm needs at least 2 links");
  for (int i = 0; i < n; ++i) {
    if (!(model.link_lengths[i] > 0.0)) {
      throw ConfigError("link " + std::to_string(i) + " length must be > 0");
    }
  }
  if (model.joint_lower.size() != n || model.joint_upper.size() != n ||
      model.vel_limit.size() != n) {
    throw ConfigError("joint limit vectors must have one entry per link");
  }
  for (int i = 0; i < n; ++i) {
    if (!(model.joint_lower[i] < model.joint_upper[i])) {
      throw ConfigError("joint " + std::to_string(i) +
                        ": lower limit must be below upper limit");
    }
    if (!(model.vel_limit[i] > 0.0)) {
      throw ConfigError("joint " + std::to_string(i) +
                        ": velocity limit must be > 0");
    }
  }
}

ArmModel make_arm(std::vector<double> link_lengths, double joint_limit,
                  double vel_limit, Vec2 base) {
  ArmModel model;
  const auto n = static_cast<Eigen::Index>(link_lengths.size());
  model.link_lengths = std::move(link_lengths);
  model.joint_lower = JointVector::Constant(n, -joint_limit);
  model.joint_upper = JointVector::Constant(n, joint_limit);
  model.vel_limit = JointVector::Constant(n, vel_limit);
  model.base_position = base;
  validate_arm(model);
  return model;
}

std::vector<Vec2> forward_kinematics(const ArmModel& model,
                                     const JointVector& q) {
  std::vector<Vec2> points(model.link_lengths.size() + 1);
  forward_kinematics(model, q, points);
  return points;
}

void forward_kinematics(const ArmModel& model, const JointVector& q,
                        std::span<Vec2> out) {
  check_dims(model, q);
  if (out.size() != model.link_lengths.size() + 1) {
    throw ContractViolation("forward_kinematics output span has wrong size");
  }
  out[0] = model.base_position;
  double angle = 0.0;
  for (int k = 0; k < model.dof(); ++k) {
    angle += q[k];
    out[k + 1] = out[k] + model.link_lengths[k] *
                              Vec2(std::cos(angle), std::sin(angle));
  }
}

Vec2 end_effector(const ArmModel& model, const JointVector& q) {
  return forward_kinematics(model, q).back();
}

Eigen::Matrix2Xd jacobian_from_points(std::span<const Vec2> points) {
  const auto n = static_cast<Eigen::Index>(points.size()) - 1;
  Eigen::Matrix2Xd jac(2, n);
  const Vec2& ee = points.back();
  for (Eigen::Index i = 0; i < n; ++i) {
    jac.col(i) = rot90(ee - points[i]);
  }
  return jac;
}

Eigen::Matrix2Xd jacobian(const ArmModel& model, const JointVector& q) {
  return jacobian_from_points(forward_kinematics(model, q));
}

double manipulability_from_points(std::span<const Vec2> points) {
  // det(J J^T) for a 2xN J, accumulated without forming J.
  const Vec2& ee = points.back();
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Vec2 c = rot90(ee - points[i]);
    sxx += c.x() * c.x();
    syy += c.y() * c.y();
    sxy += c.x() * c.y();
  }
  const double det = sxx * syy - sxy * sxy;
  return det > 0.0 ? std::sqrt(det) : 0.0;
}

double manipulability(const ArmModel& model, const JointVector& q) {
  return manipulability_from_points(forward_kinematics(model, q));
}

double estimate_max_manipulability(const ArmModel& model, int samples,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n = model.dof();
  std::vector<std::uniform_real_distribution<double>> dists;
  for (int i = 0; i < n; ++i) {
    dists.emplace_back(model.joint_lower[i], model.joint_upper[i]);
  }
  std::vector<Vec2> points(n + 1);
  JointVector q(n);
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i) q[i] = dists[i](rng);
    forward_kinematics(model, q, points);
    best = std::max(best, manipulability_from_points(points));
  }
  return best;
}

JointVector clamp_velocity(const ArmModel& model, const JointVector& v) {
  check_dims(model, v);
  return v.cwiseMax(-model.vel_limit).cwiseMin(model.vel_limit);
}

void step_dynamics_inplace(const ArmModel& model, RobotState& state,
                           const JointVector& v_cmd, double dt) {
  state.qdot = v_cmd.cwiseMax(-model.vel_limit).cwiseMin(model.vel_limit);
  state.q += state.qdot * dt;
  state.t += dt;
}

RobotState step_dynamics(const ArmModel& model, const RobotState& state,
                         const Control& u, double dt) {
  check_dims(model, state.q);
  check_dims(model, state.qdot);
  check_dims(model, u.v_cmd);
  if (!(dt > 0.0)) throw ContractViolation("dt must be positive");
  RobotState next = state;
  step_dynamics_inplace(model, next, u.v_cmd, dt);
  return next;
}

JointVector joint_limit_violation(const ArmModel& model, const JointVector& q) {
  check_dims(model, q);
  JointVector viol(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    viol[i] = std::max({0.0, model.joint_lower[i] - q[i],
                        q[i] - model.joint_upper[i]});
  }
  return viol;
}

}  // namespace binpick
