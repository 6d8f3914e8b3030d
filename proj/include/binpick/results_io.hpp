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

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "binpick/bench.hpp"
#include "binpick/config.hpp"

namespace binpick {

inline constexpr const char* kTrialsHeader =
    "horizon,mode,trial,waypoint,success,time_s,path_m";

// One row per (trial, original waypoint); waypoints are numbered from 1.
// Time and path are empty for failed waypoints.
std::string trials_csv(const std::vector<TrialResult>& trials);
std::string steps_csv(const std::vector<TrialResult>& trials);

nlohmann::json cell_to_json(const CellSummary& cell);
CellSummary cell_from_json(const nlohmann::json& j);

// Writes trials.csv, summary.json and, when asked, steps.csv into out_dir
// (created if missing). Throws std::runtime_error naming the failing path.
void write_results(const ExperimentResult& results,
                   const ExperimentConfig& config,
                   const std::filesystem::path& out_dir,
                   bool write_steps = false);

std::vector<CellSummary> read_summary(const std::filesystem::path& path);

}  // namespace binpick
