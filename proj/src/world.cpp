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

#include "binpick/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "binpick/errors.hpp"

namespace binpick {

double box_sdf(const Box& box, const Vec2& p) {
  const Vec2 center = box.center();
  const Vec2 half = 0.5 * (box.max - box.min);
  const Vec2 d = (p - center).cwiseAbs() - half;
  const double outside = d.cwiseMax(0.0).norm();
  const double inside = std::min(std::max(d.x(), d.y()), 0.0);
  return outside + inside;
}

bool boxes_overlap(const Box& a, const Box& b) {
  return a.min.x() < b.max.x() && b.min.x() < a.max.x() &&
         a.min.y() < b.max.y() && b.min.y() < a.max.y();
}

World build_bin_array(const BinArraySpec& spec) {
  if (spec.bin_count < 2) throw ConfigError("bin array needs at least 2 bins");
  if (!(spec.bin_width > 0.0) || !(spec.bin_depth > 0.0) ||
      !(spec.wall_thickness > 0.0) || !(spec.floor_thickness > 0.0)) {
    throw ConfigError("bin dimensions and wall thickness must be positive");
  }
  if (!(spec.tote.min.x() < spec.tote.max.x()) ||
      !(spec.tote.min.y() < spec.tote.max.y())) {
    throw ConfigError("tote box must have positive extent");
  }

  World world;
  const double floor_y = spec.origin.y();
  const double top_y = floor_y + spec.bin_depth;
  const double pitch = spec.bin_width + spec.wall_thickness;
  world.bin_opening_y = top_y;

  for (int w = 0; w <= spec.bin_count; ++w) {
    const double x0 = spec.origin.x() + w * pitch;
    world.obstacles.push_back(
        {Vec2(x0, floor_y), Vec2(x0 + spec.wall_thickness, top_y)});
  }
  const double row_end =
      spec.origin.x() + spec.bin_count * pitch + spec.wall_thickness;
  world.obstacles.push_back({Vec2(spec.origin.x(), floor_y -
                                                       spec.floor_thickness),
                             Vec2(row_end, floor_y)});

  // Bin interiors share their x bounds with the walls exactly.
  for (int b = 0; b < spec.bin_count; ++b) {
    world.regions.emplace(
        "bin_" + std::to_string(b),
        Box{Vec2(world.obstacles[b].max.x(), floor_y),
            Vec2(world.obstacles[b + 1].min.x(), top_y)});
  }

  const Box row{Vec2(spec.origin.x(), floor_y - spec.floor_thickness),
                Vec2(row_end, top_y)};
  if (boxes_overlap(spec.tote, row)) {
    throw ConfigError("tote region overlaps the bin row");
  }
  world.regions.emplace("tote", spec.tote);

  const auto problems = audit_world(world);
  if (!problems.empty()) throw ConfigError(problems.front());
  return world;
}

std::vector<std::string> audit_world(const World& world) {
  std::vector<std::string> problems;
  if (world.obstacles.empty()) problems.emplace_back("world has no obstacles");
  for (std::size_t i = 0; i < world.obstacles.size(); ++i) {
    const Box& b = world.obstacles[i];
    if (!(b.min.x() < b.max.x() && b.min.y() < b.max.y())) {
      problems.push_back("obstacle " + std::to_string(i) + " is degenerate");
    }
  }
  for (const auto& [name, box] : world.regions) {
    if (!(box.min.x() < box.max.x() && box.min.y() < box.max.y())) {
      problems.push_back("region " + name + " is degenerate");
    }
    for (std::size_t i = 0; i < world.obstacles.size(); ++i) {
      if (boxes_overlap(box, world.obstacles[i])) {
        problems.push_back("region " + name + " intersects obstacle " +
                           std::to_string(i));
      }
    }
    if (name.rfind("bin_", 0) == 0 && box.max.y() > world.bin_opening_y) {
      problems.push_back("bin region " + name + " extends above the opening");
    }
  }
  return problems;
}

double sdf_point(const World& world, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const Box& box : world.obstacles) best = std::min(best, box_sdf(box, p));
  return best;
}

double arm_clearance_from_points(const World& world,
                                 std::span<const Vec2> points,
                                 int samples_per_link) {
  if (samples_per_link < 2) {
    throw ContractViolation("samples_per_link must be at least 2");
  }
  double best = std::numeric_limits<double>::infinity();
  const double denom = samples_per_link - 1;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const Vec2 a = points[k];
    const Vec2 d = points[k + 1] - a;
    // Shared joint endpoints are evaluated once.
    for (int s = (k == 0 ? 0 : 1); s < samples_per_link; ++s) {
      best = std::min(best, sdf_point(world, a + (s / denom) * d));
    }
  }
  return best;
}

double arm_clearance(const World& world, const ArmModel& model,
                     const JointVector& q, int samples_per_link) {
  return arm_clearance_from_points(world, forward_kinematics(model, q),
                                   samples_per_link);
}

std::string region_of(const World& world, const Vec2& p) {
  // std::map iterates in lexicographic order, so the first hit wins ties.
  for (const auto& [name, box] : world.regions) {
    if (box.contains(p)) return name;
  }
  return kFreeRegion;
}

}  // namespace binpick
