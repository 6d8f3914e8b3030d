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

#include "binpick/mppi.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include <omp.h>

#include "binpick/errors.hpp"

namespace binpick {

void validate_mpc(const MpcConfig& c) {
  if (c.horizon < 1) throw ConfigError("horizon must be >= 1");
  if (c.particles < 2) throw ConfigError("particles must be >= 2");
  if (!(c.temperature > 0.0)) throw ConfigError("temperature must be > 0");
  if (!(c.noise_sigma > 0.0)) throw ConfigError("noise_sigma must be > 0");
  if (!(c.dt > 0.0)) throw ConfigError("dt must be > 0");
  if (!(c.discount > 0.0 && c.discount <= 1.0)) {
    throw ConfigError("discount must be in (0, 1]");
  }
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finaliser over a combined word.
  std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Perturbations sample_perturbations(const MpcConfig& config, int dof,
                                   std::uint64_t stream) {
  Perturbations noise(config.particles,
                      ControlSequence::Zero(dof, config.horizon));
  for (int i = 1; i < config.particles; ++i) {
    std::mt19937_64 rng(mix_seed(stream, static_cast<std::uint64_t>(i)));
    std::normal_distribution<double> normal(0.0, config.noise_sigma);
    for (int t = 0; t < config.horizon; ++t) {
      for (int j = 0; j < dof; ++j) noise[i](j, t) = normal(rng);
    }
  }
  return noise;
}

double rollout_cost(const ControlProblem& problem, const MpcConfig& config,
                    const RobotState& state, const ControlSequence& controls,
                    const Target& target, RolloutScratch& scratch,
                    RolloutResult* record) {
  const int horizon = static_cast<int>(controls.cols());
  if (horizon != config.horizon || controls.rows() != problem.model.dof()) {
    throw ContractViolation("control sequence shape does not match config");
  }
  const CostContext ctx{&problem.model, &problem.world, &problem.weights,
                        &problem.params, config.dt};
  scratch.state = state;
  scratch.points.resize(problem.model.link_lengths.size() + 1);
  if (record != nullptr) {
    record->states.assign(1, state);
    record->per_step.clear();
    record->invalid = false;
  }

  double total = 0.0;
  double scale = 1.0;
  double min_clearance = std::numeric_limits<double>::infinity();
  bool invalid = false;
  Control u;
  for (int t = 0; t < horizon; ++t) {
    scratch.command = controls.col(t);
    step_dynamics_inplace(problem.model, scratch.state, scratch.command,
                          config.dt);
    forward_kinematics(problem.model, scratch.state.q, scratch.points);
    double clearance = 0.0;
    const CostBreakdown c =
        total_cost(ctx, scratch.state, u, scratch.points, target,
                   horizon - t - 1, &clearance);
    min_clearance = std::min(min_clearance, clearance);
    if (std::isnan(c.total)) invalid = true;
    total += scale * c.total;
    scale *= config.discount;
    if (record != nullptr) {
      record->states.push_back(scratch.state);
      record->per_step.push_back(c);
    }
  }
  if (invalid || std::isnan(total)) {
    total = std::numeric_limits<double>::infinity();
    invalid = true;
  }
  if (record != nullptr) {
    record->total_cost = total;
    record->min_clearance = min_clearance;
    record->invalid = invalid;
  }
  return total;
}

RolloutResult rollout(const ControlProblem& problem, const MpcConfig& config,
                      const RobotState& state, const ControlSequence& controls,
                      const Target& target) {
  RolloutScratch scratch;
  RolloutResult result;
  rollout_cost(problem, config, state, controls, target, scratch, &result);
  return result;
}

namespace {

void check_batch(const MpcConfig& config, const Perturbations& perturbations,
                 std::span<double> costs) {
  if (static_cast<int>(perturbations.size()) != config.particles ||
      static_cast<int>(costs.size()) != config.particles) {
    throw ContractViolation("particle count does not match config");
  }
}

}  // namespace

void evaluate_particles_serial(const ControlProblem& problem,
                               const MpcConfig& config, const RobotState& state,
                               const NominalPlan& nominal,
                               const Perturbations& perturbations,
                               const Target& target, std::span<double> costs) {
  check_batch(config, perturbations, costs);
  RolloutScratch scratch;
  ControlSequence controls;
  for (int i = 0; i < config.particles; ++i) {
    controls = nominal.controls + perturbations[i];
    costs[i] = rollout_cost(problem, config, state, controls, target, scratch);
  }
}

void evaluate_particles_omp(const ControlProblem& problem,
                            const MpcConfig& config, const RobotState& state,
                            const NominalPlan& nominal,
                            const Perturbations& perturbations,
                            const Target& target, std::span<double> costs,
                            int num_threads) {
  check_batch(config, perturbations, costs);
  const int threads = num_threads > 0 ? num_threads : omp_get_max_threads();
#pragma omp parallel num_threads(threads) if (threads > 1)
  {
    RolloutScratch scratch;
    ControlSequence controls;
#pragma omp for schedule(static)
    for (int i = 0; i < config.particles; ++i) {
      controls = nominal.controls + perturbations[i];
      costs[i] =
          rollout_cost(problem, config, state, controls, target, scratch);
    }
  }
}

SoftmaxResult softmax_weights(std::span<const double> costs,
                              double temperature) {
  if (costs.size() < 2) throw ContractViolation("softmax needs >= 2 costs");
  if (!(temperature > 0.0)) {
    throw ContractViolation("temperature must be > 0");
  }
  SoftmaxResult result;
  result.weights.assign(costs.size(), 0.0);
  double c_min = std::numeric_limits<double>::infinity();
  for (double c : costs) {
    if (std::isfinite(c)) c_min = std::min(c_min, c);
  }
  if (!std::isfinite(c_min)) {
    result.degenerate = true;
    std::fill(result.weights.begin(), result.weights.end(),
              1.0 / static_cast<double>(costs.size()));
    return result;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    if (std::isfinite(costs[i])) {
      result.weights[i] = std::exp(-(costs[i] - c_min) / temperature);
      sum += result.weights[i];
    }
  }
  for (double& w : result.weights) w /= sum;
  return result;
}

NominalPlan update_nominal(const NominalPlan& nominal,
                           const Perturbations& perturbations,
                           std::span<const double> weights,
                           const ArmModel& model) {
  if (perturbations.size() != weights.size()) {
    throw ContractViolation("one weight per perturbation required");
  }
  NominalPlan next = nominal;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] != 0.0) next.controls += weights[i] * perturbations[i];
  }
  for (Eigen::Index t = 0; t < next.controls.cols(); ++t) {
    next.controls.col(t) = next.controls.col(t)
                               .cwiseMax(-model.vel_limit)
                               .cwiseMin(model.vel_limit);
  }
  return next;
}

MppiController::MppiController(const ControlProblem& problem,
                               const MpcConfig& config, Backend backend,
                               int num_threads)
    : problem_(problem),
      config_(config),
      backend_(backend),
      num_threads_(num_threads) {
  validate_mpc(config_);
  reset();
}

void MppiController::reset() {
  nominal_.controls = ControlSequence::Zero(problem_.model.dof(),
                                            config_.horizon);
  step_index_ = 0;
  costs_.assign(config_.particles, 0.0);
}

StepOutput MppiController::control_step(const RobotState& robot_state,
                                        const Target& target) {
  const auto start = std::chrono::steady_clock::now();
  const int dof = problem_.model.dof();
  const Perturbations noise = sample_perturbations(
      config_, dof, mix_seed(config_.seed, step_index_++));

  if (backend_ == Backend::kSerial) {
    evaluate_particles_serial(problem_, config_, robot_state, nominal_, noise,
                              target, costs_);
  } else {
    evaluate_particles_omp(problem_, config_, robot_state, nominal_, noise,
                           target, costs_, num_threads_);
  }

  const SoftmaxResult soft = softmax_weights(costs_, config_.temperature);
  nominal_ = update_nominal(nominal_, noise, soft.weights, problem_.model);

  StepOutput out;
  out.command.v_cmd = nominal_.controls.col(0);

  // Warm start: shift left, rest at the tail.
  const int h = config_.horizon;
  if (h > 1) {
    nominal_.controls.leftCols(h - 1) =
        nominal_.controls.rightCols(h - 1).eval();
  }
  nominal_.controls.col(h - 1).setZero();

  StepDiagnostics& d = out.diagnostics;
  d.best_cost = *std::min_element(costs_.begin(), costs_.end());
  d.nominal_cost = costs_[0];
  d.degenerate = soft.degenerate;
  for (double w : soft.weights) {
    if (w > 0.0) d.weight_entropy -= w * std::log(w);
  }
  d.rollout_count = static_cast<long>(config_.particles) * config_.horizon;
  d.wall_seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return out;
}

}  // namespace binpick
