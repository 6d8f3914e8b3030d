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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "binpick/kinematics.hpp"

namespace binpick {

inline constexpr const char* kFreeRegion = "free";

struct Box {
  Vec2 min;
  Vec2 max;

  bool contains(const Vec2& p) const {
    return p.x() >= min.x() && p.x() <= max.x() && p.y() >= min.y() &&
           p.y() <= max.y();
  }
  Vec2 center() const { return 0.5 * (min + max); }
  double width() const { return max.x() - min.x(); }
};

// Exact signed distance to an axis-aligned box: negative inside.
double box_sdf(const Box& box, const Vec2& p);

// True when the open interiors of two boxes overlap.
bool boxes_overlap(const Box& a, const Box& b);

struct World {
  std::vector<Box> obstacles;
  std::map<std::string, Box> regions;
  // Space above this height is free over the bin row.
  double bin_opening_y = 0.0;
};

// Open-top bins in a row, walls of equal thickness, a floor under the row,
// and a tote region (no walls) beside it.
struct BinArraySpec {
  int bin_count = 3;
  double bin_width = 0.25;
  double bin_depth = 0.3;
  double wall_thickness = 0.02;
  double floor_thickness = 0.02;
  // Left edge of the first wall and the top of the floor.
  Vec2 origin = Vec2(0.35, -0.5);
  Box tote = {Vec2(-0.6, -0.5), Vec2(-0.3, -0.2)};
};

World build_bin_array(const BinArraySpec& spec);

// Human-readable invariant violations; empty when the world is consistent.
std::vector<std::string> audit_world(const World& world);

double sdf_point(const World& world, const Vec2& p);

// Min SDF over samples_per_link points per link (endpoints included).
double arm_clearance(const World& world, const ArmModel& model,
                     const JointVector& q, int samples_per_link);
double arm_clearance_from_points(const World& world,
                                 std::span<const Vec2> points,
                                 int samples_per_link);

// Region containing p (inclusive boundaries, lexicographic tie-break), or
// kFreeRegion.
std::string region_of(const World& world, const Vec2& p);

}  // namespace binpick
