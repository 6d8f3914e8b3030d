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


#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "binpick/errors.hpp"
#include "binpick/mppi.hpp"

namespace {

using binpick::ArmModel;
using binpick::ControlSequence;
using binpick::JointVector;
using binpick::MpcConfig;
using binpick::RobotState;
using binpick::Target;
using binpick::Vec2;
constexpr double kInf = std::numeric_limits<double>::infinity();

JointVector jv(std::initializer_list<double> v) {
  JointVector q(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) q[i++] = x;
  return q;
}

struct Fixture {
  ArmModel arm = binpick::make_arm({0.4, 0.4, 0.3}, std::numbers::pi, 1.5);
  binpick::World world;
  binpick::CostWeights weights;
  binpick::CostParams params;

  Fixture() {
    binpick::BinArraySpec spec;
    spec.origin = Vec2(-0.405, -0.8);
    spec.bin_depth = 0.25;
    spec.tote = {Vec2(-0.75, -0.2), Vec2(-0.45, 0.05)};
    world = binpick::build_bin_array(spec);
    params.mu_max = binpick::estimate_max_manipulability(arm, 20000, 7);
  }
  binpick::ControlProblem problem() const {
    return {arm, world, weights, params};
  }
};

RobotState rest(const JointVector& q) {
  return {q, JointVector::Zero(q.size()), 0.0};
}

}  // namespace

TEST_CASE("softmax examples") {
  const std::vector<double> inf_pair{0.0, kInf};
  auto r = binpick::softmax_weights(inf_pair, 0.5);
  CHECK(r.weights[0] == 1.0);
  CHECK(r.weights[1] == 0.0);
  CHECK_FALSE(r.degenerate);

  const std::vector<double> equal(5, 3.0);
  r = binpick::softmax_weights(equal, 0.5);
  for (double w : r.weights) CHECK(w == doctest::Approx(0.2).epsilon(1e-15));

  const std::vector<double> ln2{0.0, std::log(2.0)};
  r = binpick::softmax_weights(ln2, 1.0);
  CHECK(std::abs(r.weights[0] - 2.0 / 3.0) <= 1e-12);
  CHECK(std::abs(r.weights[1] - 1.0 / 3.0) <= 1e-12);

  const std::vector<double> all_inf(4, kInf);
  r = binpick::softmax_weights(all_inf, 1.0);
  CHECK(r.degenerate);
  for (double w : r.weights) CHECK(w == 0.25);
}

TEST_CASE("softmax weights are a distribution") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> cost(0.0, 1e4);
  std::uniform_real_distribution<double> loglam(-3.0, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> c(64);
    for (double& x : c) x = cost(rng);
    if (trial % 5 == 0) c[trial % 64] = kInf;
    const auto r = binpick::softmax_weights(c, std::pow(10.0, loglam(rng)));
    double sum = 0.0;
    for (double w : r.weights) {
      CHECK(w >= 0.0);
      sum += w;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("softmax temperature limits") {
  const std::vector<double> c{3.0, 1.0, 2.0, 1.0};
  auto hot = binpick::softmax_weights(c, 1e9);
  for (double w : hot.weights) CHECK(std::abs(w - 0.25) <= 1e-8);
  auto cold = binpick::softmax_weights(c, 1e-6);
  CHECK(std::abs(cold.weights[1] - 0.5) <= 1e-12);
  CHECK(std::abs(cold.weights[3] - 0.5) <= 1e-12);
  CHECK(cold.weights[0] == 0.0);
  CHECK(cold.weights[2] == 0.0);
}

TEST_CASE("softmax rejects bad input") {
  const std::vector<double> one{1.0};
  const std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(binpick::softmax_weights(one, 1.0),
                  binpick::ContractViolation);
  CHECK_THROWS_AS(binpick::softmax_weights(two, 0.0),
                  binpick::ContractViolation);
}

TEST_CASE("perturbations") {
  MpcConfig cfg;
  cfg.horizon = 4;
  cfg.particles = 8;
  const auto a = binpick::sample_perturbations(cfg, 3, 42);
  const auto b = binpick::sample_perturbations(cfg, 3, 42);
  const auto c = binpick::sample_perturbations(cfg, 3, 43);
  REQUIRE(a.size() == 8);
  CHECK(a[0].isZero(0));
  CHECK(a[0].rows() == 3);
  CHECK(a[0].cols() == 4);
  bool differs = false;
  for (int i = 0; i < 8; ++i) {
    CHECK(a[i] == b[i]);
    differs = differs || a[i] != c[i];
  }
  CHECK(differs);
}

TEST_CASE("perturbation mean obeys the law of large numbers") {
  MpcConfig cfg;
  cfg.horizon = 2;
  cfg.particles = 100000;
  cfg.noise_sigma = 0.35;
  const auto noise = binpick::sample_perturbations(cfg, 3, 7);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(3, 2);
  for (std::size_t i = 1; i < noise.size(); ++i) sum += noise[i];
  const double k = static_cast<double>(noise.size() - 1);
  const Eigen::MatrixXd mean = sum / k;
  CHECK(mean.cwiseAbs().maxCoeff() <= 3.0 * cfg.noise_sigma / std::sqrt(k));
}

TEST_CASE("rollout at the goal costs nothing") {
  Fixture f;
  f.weights = {1.0, 0.0, 0.0, 0.0, 0.0};
  MpcConfig cfg;
  cfg.horizon = 1;
  const JointVector q = jv({-1.31, -2.456, 2.066});
  const Target t{binpick::end_effector(f.arm, q), 0.03};
  const auto r = binpick::rollout(f.problem(), cfg, rest(q),
                                  ControlSequence::Zero(3, 1), t);
  CHECK(r.total_cost == 0.0);
  CHECK_FALSE(r.invalid);
}

TEST_CASE("rollout states follow closed-form integration") {
  Fixture f;
  MpcConfig cfg;
  cfg.horizon = 3;
  const JointVector q0 = jv({-1.2, -2.0, 1.8});
  const JointVector u = jv({0.2, -0.1, 0.3});
  ControlSequence controls(3, 3);
  for (int t = 0; t < 3; ++t) controls.col(t) = u;
  const auto r = binpick::rollout(f.problem(), cfg, rest(q0), controls,
                                  {Vec2(0.0, -0.4), 0.03});
  REQUIRE(r.states.size() == 4);
  REQUIRE(r.per_step.size() == 3);
  double sum = 0.0;
  for (int k = 0; k <= 3; ++k) {
    const JointVector expect = q0 + u * (k * cfg.dt);
    CHECK((r.states[k].q - expect).cwiseAbs().maxCoeff() <= 1e-12);
    if (k > 0) {
      CHECK((r.states[k].qdot - u).cwiseAbs().maxCoeff() <= 1e-15);
      sum += r.per_step[k - 1].total;
    }
  }
  CHECK(r.total_cost == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("rollout flags NaN states") {
  Fixture f;
  MpcConfig cfg;
  cfg.horizon = 2;
  ControlSequence controls = ControlSequence::Zero(3, 2);
  controls(1, 1) = std::numeric_limits<double>::quiet_NaN();
  const auto r = binpick::rollout(f.problem(), cfg, rest(jv({-1.2, -2, 1.8})),
                                  controls, {Vec2(0, -0.4), 0.03});
  CHECK(r.invalid);
  CHECK(r.total_cost == kInf);
}

TEST_CASE("update_nominal") {
  const ArmModel arm = binpick::make_arm({0.4, 0.4, 0.3}, 3.0, 1.5);
  binpick::NominalPlan nominal{ControlSequence::Constant(3, 5, 0.1)};
  binpick::Perturbations noise(2, ControlSequence::Zero(3, 5));
  noise[1].setConstant(0.2);
  std::vector<double> w{1.0, 0.0};
  CHECK(binpick::update_nominal(nominal, noise, w, arm).controls ==
        nominal.controls);

  noise[0].setConstant(0.3);
  noise[1].setConstant(-0.3);
  w = {0.5, 0.5};
  CHECK(binpick::update_nominal(nominal, noise, w, arm)
            .controls.isApprox(nominal.controls, 1e-15));

  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 0.6);
  std::uniform_real_distribution<double> uw(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    binpick::Perturbations p(6, ControlSequence(3, 5));
    std::vector<double> weights(6);
    double total = 0.0;
    for (int i = 0; i < 6; ++i) {
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 5; ++c) p[i](r, c) = n(rng);
      weights[i] = uw(rng);
      total += weights[i];
    }
    for (double& x : weights) x /= total;
    const auto updated = binpick::update_nominal(nominal, p, weights, arm);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 5; ++c) {
        double v = nominal.controls(r, c);
        for (int i = 0; i < 6; ++i) v += weights[i] * p[i](r, c);
        v = std::clamp(v, -1.5, 1.5);
        CHECK(std::abs(updated.controls(r, c) - v) <= 1e-12);
      }
    }
  }
}

TEST_CASE("serial and OpenMP kernels agree bit for bit") {
  Fixture f;
  MpcConfig cfg;
  cfg.horizon = 30;
  cfg.particles = 64;
  const auto problem = f.problem();
  const auto noise = binpick::sample_perturbations(cfg, 3, 1234);
  binpick::NominalPlan nominal{ControlSequence::Constant(3, 30, 0.05)};
  const RobotState s = rest(jv({-1.31, -2.456, 2.066}));
  const Target t{Vec2(0.0, -0.64), 0.03};
  std::vector<double> serial(64), omp1(64), omp8(64);
  binpick::evaluate_particles_serial(problem, cfg, s, nominal, noise, t, serial);
  binpick::evaluate_particles_omp(problem, cfg, s, nominal, noise, t, omp1, 1);
  binpick::evaluate_particles_omp(problem, cfg, s, nominal, noise, t, omp8, 8);
  CHECK(serial == omp1);
  CHECK(serial == omp8);
}

TEST_CASE("controller output is identical across backends and threads") {
  Fixture f;
  MpcConfig cfg;
  cfg.horizon = 20;
  cfg.seed = 77;
  const auto problem = f.problem();
  binpick::MppiController serial(problem, cfg, binpick::Backend::kSerial);
  binpick::MppiController one(problem, cfg, binpick::Backend::kOpenMP, 1);
  binpick::MppiController eight(problem, cfg, binpick::Backend::kOpenMP, 8);
  RobotState s = rest(jv({-1.31, -2.456, 2.066}));
  const Target t{Vec2(-0.26, -0.75), 0.03};
  for (int step = 0; step < 10; ++step) {
    const auto a = serial.control_step(s, t);
    const auto b = one.control_step(s, t);
    const auto c = eight.control_step(s, t);
    CHECK(a.command.v_cmd == b.command.v_cmd);
    CHECK(a.command.v_cmd == c.command.v_cmd);
    CHECK(a.diagnostics.rollout_count == 20L * 64);
    s = binpick::step_dynamics(f.arm, s, a.command, cfg.dt);
  }
}

TEST_CASE("warm start shifts the plan and pads with zeros") {
  Fixture f;
  MpcConfig cfg;
  cfg.horizon = 10;
  cfg.seed = 3;
  binpick::MppiController ctl(f.problem(), cfg, binpick::Backend::kSerial);
  const RobotState s = rest(jv({-1.31, -2.456, 2.066}));
  const auto out = ctl.control_step(s, {Vec2(-0.1, -0.5), 0.03});
  const auto& plan = ctl.nominal().controls;
  CHECK(plan.cols() == 10);
  CHECK(plan.col(9).isZero(0));
  CHECK_FALSE(out.command.v_cmd.isZero(0));
  ctl.reset();
  CHECK(ctl.nominal().controls.isZero(0));
}

TEST_CASE("controller at the goal with vanishing noise stays put") {
  Fixture f;
  MpcConfig cfg;
  cfg.noise_sigma = 1e-9;
  cfg.seed = 9;
  binpick::MppiController ctl(f.problem(), cfg, binpick::Backend::kSerial);
  const JointVector q = jv({-1.31, -2.456, 2.066});
  const auto out =
      ctl.control_step(rest(q), {binpick::end_effector(f.arm, q), 0.03});
  CHECK(out.command.v_cmd.cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("one update rarely makes the nominal worse") {
  Fixture f;
  binpick::World open;  // free space
  const binpick::ControlProblem problem{f.arm, open, f.weights, f.params};
  MpcConfig cfg;
  cfg.horizon = 20;
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> uq(-0.8, 0.8);
  int improved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const RobotState s = rest(jv({uq(rng), -1.2 + uq(rng), 1.0 + uq(rng)}));
    const Target t{Vec2(0.5 + 0.2 * uq(rng), 0.2 + 0.2 * uq(rng)), 0.03};
    binpick::NominalPlan nominal{ControlSequence::Zero(3, cfg.horizon)};
    const auto noise = binpick::sample_perturbations(
        cfg, 3, binpick::mix_seed(2024, static_cast<std::uint64_t>(trial)));
    std::vector<double> costs(cfg.particles);
    binpick::evaluate_particles_serial(problem, cfg, s, nominal, noise, t,
                                       costs);
    const auto w = binpick::softmax_weights(costs, cfg.temperature);
    const auto updated = binpick::update_nominal(nominal, noise, w.weights,
                                                 f.arm);
    binpick::RolloutScratch scratch;
    const double before =
        binpick::rollout_cost(problem, cfg, s, nominal.controls, t, scratch);
    const double after =
        binpick::rollout_cost(problem, cfg, s, updated.controls, t, scratch);
    if (after <= before) ++improved;
  }
  CHECK(improved >= 90);
}

TEST_CASE("mpc config validation") {
  MpcConfig cfg;
  CHECK_NOTHROW(binpick::validate_mpc(cfg));
  cfg.particles = 1;
  CHECK_THROWS_AS(binpick::validate_mpc(cfg), binpick::ConfigError);
  cfg = {};
  cfg.horizon = 0;
  CHECK_THROWS_AS(binpick::validate_mpc(cfg), binpick::ConfigError);
  cfg = {};
  cfg.temperature = 0;
  CHECK_THROWS_AS(binpick::validate_mpc(cfg), binpick::ConfigError);
  cfg = {};
  cfg.noise_sigma = -1;
  CHECK_THROWS_AS(binpick::validate_mpc(cfg), binpick::ConfigError);
}
