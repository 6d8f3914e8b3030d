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


#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "binpick/errors.hpp"
#include "binpick/hierarchy.hpp"

namespace {

using binpick::ArmModel;
using binpick::Box;
using binpick::ExpandedTarget;
using binpick::RobotState;
using binpick::SupervisorStatus;
using binpick::Target;
using binpick::TaskPlan;
using binpick::Vec2;
using binpick::World;

ArmModel desk_arm() {
  return binpick::make_arm({0.4, 0.4, 0.3}, std::numbers::pi, 1.5);
}

World scene() {
  binpick::BinArraySpec spec;
  spec.bin_width = 0.25;
  spec.bin_depth = 0.25;
  spec.origin = Vec2(-0.405, -0.8);
  spec.tote = {Vec2(-0.75, -0.2), Vec2(-0.45, 0.05)};
  return binpick::build_bin_array(spec);
}

TaskPlan plan_of(const World& w, std::vector<Vec2> points, double tol = 0.03) {
  TaskPlan plan;
  for (const Vec2& p : points) {
    plan.waypoints.push_back({p, tol});
    plan.labels.push_back(binpick::region_of(w, p));
  }
  return plan;
}

TaskPlan five_waypoints(const World& w) {
  return plan_of(w, {Vec2(-0.26, -0.75), Vec2(-0.55, -0.1), Vec2(0.0, -0.64),
                     Vec2(0.27, -0.56), Vec2(0.0, -0.64)});
}

const Vec2 kStart(-0.26, -0.45);

// Liang-Barsky clip of the segment against the closed box.
bool segment_hits_box(const Vec2& a, const Vec2& b, const Box& box) {
  double t0 = 0.0, t1 = 1.0;
  const Vec2 d = b - a;
  const double p[4] = {-d.x(), d.x(), -d.y(), d.y()};
  const double q[4] = {a.x() - box.min.x(), box.max.x() - a.x(),
                       a.y() - box.min.y(), box.max.y() - a.y()};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
    } else {
      const double t = q[i] / p[i];
      if (p[i] < 0.0) t0 = std::max(t0, t);
      else t1 = std::min(t1, t);
    }
  }
  return t0 <= t1;
}

bool leg_is_free(const World& w, const Vec2& a, const Vec2& b) {
  for (const Box& box : w.obstacles) {
    if (segment_hits_box(a, b, box)) return false;
  }
  return true;
}

int injected_count(const std::vector<ExpandedTarget>& e) {
  return static_cast<int>(std::count_if(
      e.begin(), e.end(), [](const ExpandedTarget& t) { return t.injected; }));
}

RobotState still() {
  return {Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3), 0.0};
}

}  // namespace

TEST_CASE("segment-box oracle sanity") {
  const Box b{Vec2(0, 0), Vec2(1, 1)};
  CHECK(segment_hits_box(Vec2(-1, 0.5), Vec2(2, 0.5), b));
  CHECK_FALSE(segment_hits_box(Vec2(-1, 1.5), Vec2(2, 1.5), b));
  CHECK(segment_hits_box(Vec2(0.5, 0.5), Vec2(0.6, 0.6), b));
  CHECK_FALSE(segment_hits_box(Vec2(-1, 0), Vec2(0, 2.1), b));
}

TEST_CASE("same-region waypoints get no helpers") {
  const World w = scene();
  const auto e = binpick::expand_waypoints(
      plan_of(w, {Vec2(-0.3, -0.7), Vec2(-0.2, -0.7)}), w, desk_arm(), kStart,
      {});
  CHECK(e.size() == 2);
  CHECK(injected_count(e) == 0);
}

TEST_CASE("adjacent bins get a retract and a transit point") {
  const World w = scene();
  const auto e = binpick::expand_waypoints(
      plan_of(w, {Vec2(0.0, -0.7), Vec2(0.27, -0.7)}), w, desk_arm(),
      Vec2(0.0, -0.45), {0.05});
  REQUIRE(e.size() == 4);
  const double safe = w.bin_opening_y + 0.05;
  CHECK_FALSE(e[0].injected);
  CHECK(e[1].injected);
  CHECK(e[1].target.position.isApprox(Vec2(0.0, safe)));
  CHECK(e[2].injected);
  CHECK(e[2].target.position.isApprox(Vec2(0.27, safe)));
  CHECK(e[1].original_index == 1);
  CHECK(e[2].original_index == 1);
  CHECK_FALSE(e[3].injected);
  CHECK(e[2].target.reach_tolerance == e[3].target.reach_tolerance);
}

TEST_CASE("far targets from free space get a transit point") {
  const World w = scene();
  const auto e = binpick::expand_waypoints(plan_of(w, {Vec2(0.0, -0.7)}), w,
                                           desk_arm(), kStart, {});
  REQUIRE(e.size() == 2);
  CHECK(e[0].injected);
  CHECK(e[0].target.position.x() == 0.0);
}

TEST_CASE("five-waypoint scenario expansion") {
  const World w = scene();
  const auto e = binpick::expand_waypoints(five_waypoints(w), w, desk_arm(),
                                           kStart, {});
  // Tote above the opening needs no retract on the way out and no transit on
  // the way in; the bin-to-bin legs need both.
  CHECK(e.size() == 11);
  std::vector<int> originals;
  for (const auto& t : e) {
    if (!t.injected) originals.push_back(t.original_index);
  }
  CHECK(originals == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("expansion is idempotent") {
  const World w = scene();
  const ArmModel arm = desk_arm();
  const auto once =
      binpick::expand_waypoints(five_waypoints(w), w, arm, kStart, {});
  const auto twice = binpick::expand_waypoints(binpick::as_plan(once, w), w,
                                               arm, kStart, {});
  REQUIRE(twice.size() == once.size());
  CHECK(injected_count(twice) == 0);
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(twice[i].target.position == once[i].target.position);
  }
}

TEST_CASE("unreachable waypoints are rejected") {
  const World w = scene();
  CHECK_THROWS_AS(
      binpick::expand_waypoints(plan_of(w, {Vec2(2.0, 0.0)}), w, desk_arm(),
                                kStart, {}),
      binpick::ConfigError);
  CHECK_THROWS_AS(binpick::expand_waypoints(TaskPlan{}, w, desk_arm(), kStart,
                                            {}),
                  binpick::ConfigError);
}

TEST_CASE("plan validation") {
  const World w = scene();
  TaskPlan plan = five_waypoints(w);
  CHECK_NOTHROW(binpick::validate_plan(plan, w, desk_arm()));
  plan.labels[2] = "bin_2";
  CHECK_THROWS_AS(binpick::validate_plan(plan, w, desk_arm()),
                  binpick::ConfigError);
  plan = five_waypoints(w);
  plan.labels[0] = "bin_9";
  CHECK_THROWS_AS(binpick::validate_plan(plan, w, desk_arm()),
                  binpick::ConfigError);
}

TEST_CASE("random plans: order, height and obstacle-free legs") {
  const World w = scene();
  const ArmModel arm = desk_arm();
  std::mt19937_64 rng(77);
  std::vector<std::string> names;
  for (const auto& [name, box] : w.regions) names.push_back(name);
  std::uniform_int_distribution<std::size_t> pick(0, names.size() - 1);
  std::uniform_real_distribution<double> unit(0.15, 0.85);
  std::uniform_int_distribution<int> length(1, 8);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Vec2> pts;
    const int n = length(rng);
    for (int k = 0; k < n; ++k) {
      const Box& b = w.regions.at(names[pick(rng)]);
      pts.push_back(b.min + (b.max - b.min).cwiseProduct(
                                Vec2(unit(rng), unit(rng))));
    }
    const TaskPlan plan = plan_of(w, pts);
    const auto e = binpick::expand_waypoints(plan, w, arm, kStart, {});

    std::vector<int> order;
    Vec2 prev = kStart;
    for (const auto& t : e) {
      if (t.injected) {
        CHECK(t.target.position.y() > w.bin_opening_y);
      } else {
        order.push_back(t.original_index);
        CHECK(t.target.position == plan.waypoints[t.original_index].position);
      }
      CHECK(leg_is_free(w, prev, t.target.position));
      prev = t.target.position;
    }
    std::vector<int> expect(n);
    for (int k = 0; k < n; ++k) expect[k] = k;
    CHECK(order == expect);

    const auto again =
        binpick::expand_waypoints(binpick::as_plan(e, w), w, arm, kStart, {});
    CHECK(injected_count(again) == 0);
    CHECK(again.size() == e.size());
  }
}

TEST_CASE("flat supervisor keeps the plan as is") {
  const World w = scene();
  const auto s = binpick::flat_supervisor(five_waypoints(w), {});
  CHECK(s.expanded().size() == 5);
  CHECK(injected_count(s.expanded()) == 0);
}

TEST_CASE("supervisor advances only when settled") {
  const World w = scene();
  const TaskPlan plan = plan_of(w, {Vec2(0.0, -0.7), Vec2(0.27, -0.7)});
  auto s = binpick::flat_supervisor(plan, {0.1, 12.0});
  RobotState moving = still();
  moving.qdot[1] = 0.5;
  CHECK(s.step(moving, Vec2(0.01, -0.7), 1.0).status ==
        SupervisorStatus::kRunning);
  CHECK(s.step(still(), Vec2(0.2, -0.7), 1.0).status ==
        SupervisorStatus::kRunning);
  const auto adv = s.step(still(), Vec2(0.01, -0.7), 2.0);
  CHECK(adv.status == SupervisorStatus::kAdvanced);
  REQUIRE(adv.reached_original.has_value());
  CHECK(*adv.reached_original == 0);
  CHECK(s.deadline() == doctest::Approx(14.0));
  const auto done = s.step(still(), Vec2(0.27, -0.69), 3.0);
  CHECK(done.status == SupervisorStatus::kDone);
  CHECK(s.done());
  CHECK(s.outcomes()[0].success);
  CHECK(s.outcomes()[1].time_s == 3.0);
  CHECK(s.step(still(), Vec2(0, 0), 4.0).status == SupervisorStatus::kDone);
}

TEST_CASE("timeout in continue mode skips to the next original") {
  const World w = scene();
  const TaskPlan plan = plan_of(
      w, {Vec2(0.0, -0.7), Vec2(0.27, -0.7), Vec2(0.0, -0.7)});
  auto s = binpick::hierarchical_supervisor(plan, w, desk_arm(),
                                            Vec2(0.0, -0.45), {}, {0.1, 5.0});
  REQUIRE(s.expanded().size() == 7);
  CHECK(s.step(still(), Vec2(0.0, -0.7), 1.0).status ==
        SupervisorStatus::kAdvanced);
  CHECK(s.active().position.y() > w.bin_opening_y);
  // Stuck below the retract point until the shared budget runs out.
  CHECK(s.step(still(), Vec2(0.0, -0.7), 5.9).status ==
        SupervisorStatus::kRunning);
  const auto out = s.step(still(), Vec2(0.0, -0.7), 6.05);
  CHECK(out.status == SupervisorStatus::kTimeout);
  CHECK(out.failed_originals == std::vector<int>{1});
  CHECK(s.expanded()[s.cursor()].original_index == 2);
  CHECK(s.deadline() == doctest::Approx(11.05));
  CHECK_FALSE(s.outcomes()[1].success);
}

TEST_CASE("timeout in halt mode fails everything left") {
  const World w = scene();
  const TaskPlan plan = plan_of(
      w, {Vec2(0.0, -0.7), Vec2(0.27, -0.7), Vec2(0.0, -0.7)});
  auto s = binpick::flat_supervisor(
      plan, {0.1, 5.0, binpick::FailureMode::kHalt});
  const auto out = s.step(still(), Vec2(0.3, 0.3), 5.5);
  CHECK(out.status == SupervisorStatus::kTimeout);
  CHECK(out.failed_originals == std::vector<int>{0, 1, 2});
  CHECK(s.done());
}
