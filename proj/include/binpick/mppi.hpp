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

#include "binpick/cost.hpp"
#include "binpick/kinematics.hpp"
#include "binpick/world.hpp"

namespace binpick {

struct MpcConfig {
  int horizon = 20;
  int particles = 64;
  double noise_sigma = 0.35;  // rad/s, per joint
  double temperature = 0.5;
  double dt = 0.05;
  std::uint64_t seed = 0;
  // Per-step cost discount; 1 sums the horizon uniformly.
  double discount = 1.0;
};

void validate_mpc(const MpcConfig& config);

// One command per column: rows are joints, columns are horizon steps.
using ControlSequence = Eigen::MatrixXd;

struct NominalPlan {
  ControlSequence controls;
};

using Perturbations = std::vector<ControlSequence>;

// Everything a rollout reads besides the state, controls and target.
// Referenced objects must outlive the problem.
struct ControlProblem {
  const ArmModel& model;
  const World& world;
  const CostWeights& weights;
  const CostParams& params;
};

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

// K noise sequences for one control step. Particle i draws from its own
// generator seeded by (stream, i); particle 0 is all zeros.
Perturbations sample_perturbations(const MpcConfig& config, int dof,
                                   std::uint64_t stream);

struct RolloutResult {
  std::vector<RobotState> states;      // H + 1, states[0] is the query state
  std::vector<CostBreakdown> per_step;  // H
  double total_cost = 0.0;
  double min_clearance = 0.0;
  bool invalid = false;  // a NaN appeared; total_cost is +inf
};

// Reusable buffers for the allocation-free rollout path.
struct RolloutScratch {
  RobotState state;
  JointVector command;
  std::vector<Vec2> points;
};

// Simulates `controls` from `state` and sums the running cost. Fills
// `record` when non-null. Returns +inf when any cost is NaN.
double rollout_cost(const ControlProblem& problem, const MpcConfig& config,
                    const RobotState& state, const ControlSequence& controls,
                    const Target& target, RolloutScratch& scratch,
                    RolloutResult* record = nullptr);

RolloutResult rollout(const ControlProblem& problem, const MpcConfig& config,
                      const RobotState& state, const ControlSequence& controls,
                      const Target& target);

// Cost of nominal + perturbation[i] for every particle. The serial kernel is
// the reference; the OpenMP kernel must reproduce it bit for bit.
void evaluate_particles_serial(const ControlProblem& problem,
                               const MpcConfig& config, const RobotState& state,
                               const NominalPlan& nominal,
                               const Perturbations& perturbations,
                               const Target& target, std::span<double> costs);
void evaluate_particles_omp(const ControlProblem& problem,
                            const MpcConfig& config, const RobotState& state,
                            const NominalPlan& nominal,
                            const Perturbations& perturbations,
                            const Target& target, std::span<double> costs,
                            int num_threads);

struct SoftmaxResult {
  std::vector<double> weights;
  bool degenerate = false;  // every cost was infinite
};

SoftmaxResult softmax_weights(std::span<const double> costs,
                              double temperature);

NominalPlan update_nominal(const NominalPlan& nominal,
                           const Perturbations& perturbations,
                           std::span<const double> weights,
                           const ArmModel& model);

struct StepDiagnostics {
  double best_cost = 0.0;
  double nominal_cost = 0.0;  // particle 0
  double weight_entropy = 0.0;
  double wall_seconds = 0.0;
  long rollout_count = 0;  // K * H state expansions
  bool degenerate = false;
};

struct StepOutput {
  Control command;
  StepDiagnostics diagnostics;
};

enum class Backend { kSerial, kOpenMP };

// Single-owner receding-horizon controller. Not safe to step concurrently.
class MppiController {
 public:
  // num_threads <= 0 uses the OpenMP default.
  MppiController(const ControlProblem& problem, const MpcConfig& config,
                 Backend backend = Backend::kOpenMP, int num_threads = 0);

  StepOutput control_step(const RobotState& robot_state, const Target& target);

  const NominalPlan& nominal() const { return nominal_; }
  const MpcConfig& config() const { return config_; }
  void reset();

 private:
  ControlProblem problem_;
  MpcConfig config_;
  Backend backend_;
  int num_threads_;
  NominalPlan nominal_;
  std::uint64_t step_index_ = 0;
  std::vector<double> costs_;
};

}  // namespace binpick
