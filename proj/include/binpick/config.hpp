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
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "binpick/cost.hpp"
#include "binpick/hierarchy.hpp"
#include "binpick/kinematics.hpp"
#include "binpick/mppi.hpp"
#include "binpick/world.hpp"

namespace binpick {

enum class ControlMode { kFlat, kHierarchical };

std::string to_string(ControlMode mode);
ControlMode parse_mode(const std::string& name);

// Everything a horizon sweep needs. The horizon inside `mpc` is ignored;
// each cell sets its own from `horizons`.
struct ExperimentConfig {
  ArmModel arm;
  BinArraySpec world;
  CostWeights weights;
  CostParams cost;
  int mu_max_samples = 100000;
  std::uint64_t mu_max_seed = 7;
  MpcConfig mpc;

  JointVector start_q;
  TaskPlan plan;
  ExpansionParams expansion;
  SupervisorParams supervisor;

  std::vector<int> horizons = {20, 30, 40};
  std::vector<ControlMode> modes = {ControlMode::kFlat,
                                    ControlMode::kHierarchical};
  int trials = 10;
  std::uint64_t base_seed = 1;
};

// Parses the sectioned JSON document {arm, world, cost, mppi, scenario,
// experiment}. Throws ConfigError with the offending key on bad input.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

// Structural checks that need no geometry (counts, ranges).
void validate_config(const ExperimentConfig& config);

// Geometry and derived quantities built once per experiment.
struct Scenario {
  ArmModel model;
  World world;
  CostWeights weights;
  CostParams params;  // mu_max filled in
  TaskPlan plan;
  JointVector start_q;
  Vec2 ee_start;
};

Scenario build_scenario(const ExperimentConfig& config);

}  // namespace binpick
