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

#include "binpick/config.hpp"

#include <fstream>

#include "binpick/errors.hpp"

namespace binpick {
namespace {

using nlohmann::json;

const json& section(const json& doc, const char* name) {
  if (!doc.contains(name) || !doc.at(name).is_object()) {
    throw ConfigError(std::string("config is missing section '") + name + "'");
  }
  return doc.at(name);
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
T require(const json& obj, const char* key) {
  if (!obj.contains(key)) {
    throw ConfigError(std::string("config is missing key '") + key + "'");
  }
  return get_or<T>(obj, key, T{});
}

Vec2 to_vec2(const json& j, const char* key) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 2) {
    throw ConfigError(std::string("'") + key + "' must be a 2-element array");
  }
  return Vec2(v[0], v[1]);
}

Vec2 require_vec2(const json& obj, const char* key) {
  if (!obj.contains(key)) {
    throw ConfigError(std::string("config is missing key '") + key + "'");
  }
  return to_vec2(obj.at(key), key);
}

// A scalar broadcasts to every joint; an array must have one entry per joint.
JointVector per_joint(const json& obj, const char* key, int n,
                      double fallback) {
  if (!obj.contains(key)) return JointVector::Constant(n, fallback);
  const json& v = obj.at(key);
  if (v.is_number()) return JointVector::Constant(n, v.get<double>());
  const auto values = v.get<std::vector<double>>();
  if (static_cast<int>(values.size()) != n) {
    throw ConfigError(std::string("'") + key + "' needs " + std::to_string(n) +
                      " entries");
  }
  return Eigen::Map<const JointVector>(values.data(), n);
}

std::vector<double> to_std(const JointVector& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

std::string to_string(ControlMode mode) {
  return mode == ControlMode::kFlat ? "flat" : "hierarchical";
}

ControlMode parse_mode(const std::string& name) {
  if (name == "flat") return ControlMode::kFlat;
  if (name == "hierarchical") return ControlMode::kHierarchical;
  throw ConfigError("unknown mode '" + name +
                    "' (expected flat or hierarchical)");
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  try {
    const json& arm = section(doc, "arm");
    c.arm.link_lengths = require<std::vector<double>>(arm, "link_lengths");
    const int n = static_cast<int>(c.arm.link_lengths.size());
    c.arm.joint_lower = per_joint(arm, "joint_lower", n, -M_PI);
    c.arm.joint_upper = per_joint(arm, "joint_upper", n, M_PI);
    c.arm.vel_limit = per_joint(arm, "vel_limit", n, 1.5);
    if (arm.contains("base")) c.arm.base_position = to_vec2(arm["base"], "base");

    const json& world = section(doc, "world");
    c.world.bin_count = require<int>(world, "bin_count");
    c.world.bin_width = require<double>(world, "bin_width");
    c.world.bin_depth = require<double>(world, "bin_depth");
    c.world.wall_thickness = require<double>(world, "wall_thickness");
    c.world.floor_thickness =
        get_or(world, "floor_thickness", c.world.floor_thickness);
    c.world.origin = require_vec2(world, "origin");
    if (!world.contains("tote")) throw ConfigError("world is missing 'tote'");
    c.world.tote = {require_vec2(world["tote"], "min"),
                    require_vec2(world["tote"], "max")};

    const json& cost = section(doc, "cost");
    if (cost.contains("weights")) {
      const json& w = cost["weights"];
      c.weights.alpha_p = get_or(w, "alpha_p", c.weights.alpha_p);
      c.weights.alpha_s = get_or(w, "alpha_s", c.weights.alpha_s);
      c.weights.alpha_j = get_or(w, "alpha_j", c.weights.alpha_j);
      c.weights.alpha_m = get_or(w, "alpha_m", c.weights.alpha_m);
      c.weights.alpha_c = get_or(w, "alpha_c", c.weights.alpha_c);
    }
    CostParams& p = c.cost;
    p.d_safe = get_or(cost, "d_safe", p.d_safe);
    p.k_pen = get_or(cost, "k_pen", p.k_pen);
    p.epsilon = get_or(cost, "epsilon", p.epsilon);
    p.joint_margin = get_or(cost, "joint_margin", p.joint_margin);
    p.manip_ceiling = get_or(cost, "manip_ceiling", p.manip_ceiling);
    p.stop_decel = get_or(cost, "stop_decel", p.stop_decel);
    p.link_radius = get_or(cost, "link_radius", p.link_radius);
    p.samples_per_link = get_or(cost, "samples_per_link", p.samples_per_link);
    c.mu_max_samples = get_or(cost, "mu_max_samples", c.mu_max_samples);
    c.mu_max_seed = get_or(cost, "mu_max_seed", c.mu_max_seed);

    const json& mppi = section(doc, "mppi");
    c.mpc.particles = get_or(mppi, "particles", c.mpc.particles);
    c.mpc.noise_sigma = get_or(mppi, "noise_sigma", c.mpc.noise_sigma);
    c.mpc.temperature = get_or(mppi, "temperature", c.mpc.temperature);
    c.mpc.dt = get_or(mppi, "dt", c.mpc.dt);
    c.mpc.discount = get_or(mppi, "discount", c.mpc.discount);

    const json& sc = section(doc, "scenario");
    const auto start = require<std::vector<double>>(sc, "start_q");
    c.start_q = Eigen::Map<const JointVector>(start.data(),
                                              static_cast<int>(start.size()));
    const double default_tol = get_or(sc, "reach_tolerance", 0.03);
    if (!sc.contains("waypoints") || !sc["waypoints"].is_array()) {
      throw ConfigError("scenario is missing 'waypoints'");
    }
    for (const json& w : sc["waypoints"]) {
      Target t;
      t.position = require_vec2(w, "position");
      t.reach_tolerance = get_or(w, "tolerance", default_tol);
      c.plan.waypoints.push_back(t);
      c.plan.labels.push_back(require<std::string>(w, "label"));
    }
    c.expansion.clearance_margin =
        get_or(sc, "clearance_margin", c.expansion.clearance_margin);
    c.supervisor.v_settle = get_or(sc, "v_settle", c.supervisor.v_settle);
    c.supervisor.budget_s = get_or(sc, "budget_s", c.supervisor.budget_s);

    const json& ex = section(doc, "experiment");
    c.horizons = get_or(ex, "horizons", c.horizons);
    if (ex.contains("modes")) {
      c.modes.clear();
      for (const auto& m : ex["modes"].get<std::vector<std::string>>()) {
        c.modes.push_back(parse_mode(m));
      }
    }
    c.trials = get_or(ex, "trials", c.trials);
    c.base_seed = get_or(ex, "base_seed", c.base_seed);
    const auto failure = get_or<std::string>(ex, "failure_mode", "continue");
    if (failure == "continue") {
      c.supervisor.failure_mode = FailureMode::kContinue;
    } else if (failure == "halt") {
      c.supervisor.failure_mode = FailureMode::kHalt;
    } else {
      throw ConfigError("failure_mode must be 'continue' or 'halt'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

void validate_config(const ExperimentConfig& c) {
  validate_arm(c.arm);
  validate_weights(c.weights);
  validate_params(c.cost);
  MpcConfig probe = c.mpc;
  for (int h : c.horizons) {
    probe.horizon = h;
    validate_mpc(probe);
  }
  if (c.horizons.empty()) throw ConfigError("horizon list is empty");
  if (c.modes.empty()) throw ConfigError("mode list is empty");
  if (c.trials < 1) throw ConfigError("trials must be >= 1");
  if (c.plan.waypoints.empty()) throw ConfigError("scenario has no waypoints");
  if (c.start_q.size() != c.arm.dof()) {
    throw ConfigError("start_q needs one entry per joint");
  }
  if (c.mu_max_samples < 1) throw ConfigError("mu_max_samples must be >= 1");
  if (!(c.supervisor.budget_s > 0.0)) throw ConfigError("budget_s must be > 0");
  if (!(c.supervisor.v_settle >= 0.0)) {
    throw ConfigError("v_settle must be >= 0");
  }
}

json to_json(const ExperimentConfig& c) {
  json doc;
  doc["arm"] = {{"link_lengths", c.arm.link_lengths},
                {"joint_lower", to_std(c.arm.joint_lower)},
                {"joint_upper", to_std(c.arm.joint_upper)},
                {"vel_limit", to_std(c.arm.vel_limit)},
                {"base", {c.arm.base_position.x(), c.arm.base_position.y()}}};
  doc["world"] = {
      {"bin_count", c.world.bin_count},
      {"bin_width", c.world.bin_width},
      {"bin_depth", c.world.bin_depth},
      {"wall_thickness", c.world.wall_thickness},
      {"floor_thickness", c.world.floor_thickness},
      {"origin", {c.world.origin.x(), c.world.origin.y()}},
      {"tote",
       {{"min", {c.world.tote.min.x(), c.world.tote.min.y()}},
        {"max", {c.world.tote.max.x(), c.world.tote.max.y()}}}}};
  doc["cost"] = {{"weights",
                  {{"alpha_p", c.weights.alpha_p},
                   {"alpha_s", c.weights.alpha_s},
                   {"alpha_j", c.weights.alpha_j},
                   {"alpha_m", c.weights.alpha_m},
                   {"alpha_c", c.weights.alpha_c}}},
                 {"d_safe", c.cost.d_safe},
                 {"k_pen", c.cost.k_pen},
                 {"epsilon", c.cost.epsilon},
                 {"joint_margin", c.cost.joint_margin},
                 {"manip_ceiling", c.cost.manip_ceiling},
                 {"stop_decel", c.cost.stop_decel},
                 {"link_radius", c.cost.link_radius},
                 {"samples_per_link", c.cost.samples_per_link},
                 {"mu_max_samples", c.mu_max_samples},
                 {"mu_max_seed", c.mu_max_seed}};
  doc["mppi"] = {{"particles", c.mpc.particles},
                 {"noise_sigma", c.mpc.noise_sigma},
                 {"temperature", c.mpc.temperature},
                 {"dt", c.mpc.dt},
                 {"discount", c.mpc.discount}};
  json waypoints = json::array();
  for (std::size_t k = 0; k < c.plan.waypoints.size(); ++k) {
    const Target& t = c.plan.waypoints[k];
    waypoints.push_back({{"label", c.plan.labels[k]},
                         {"position", {t.position.x(), t.position.y()}},
                         {"tolerance", t.reach_tolerance}});
  }
  doc["scenario"] = {{"start_q", to_std(c.start_q)},
                     {"waypoints", waypoints},
                     {"clearance_margin", c.expansion.clearance_margin},
                     {"v_settle", c.supervisor.v_settle},
                     {"budget_s", c.supervisor.budget_s}};
  std::vector<std::string> modes;
  for (ControlMode m : c.modes) modes.push_back(to_string(m));
  doc["experiment"] = {
      {"horizons", c.horizons},
      {"modes", modes},
      {"trials", c.trials},
      {"base_seed", c.base_seed},
      {"failure_mode", c.supervisor.failure_mode == FailureMode::kHalt
                           ? "halt"
                           : "continue"}};
  return doc;
}

Scenario build_scenario(const ExperimentConfig& config) {
  validate_config(config);
  Scenario s;
  s.model = config.arm;
  s.world = build_bin_array(config.world);
  s.weights = config.weights;
  s.params = config.cost;
  s.params.mu_max = estimate_max_manipulability(
      s.model, config.mu_max_samples, config.mu_max_seed);
  s.plan = config.plan;
  validate_plan(s.plan, s.world, s.model);
  s.start_q = config.start_q;
  s.ee_start = end_effector(s.model, s.start_q);
  return s;
}

}  // namespace binpick
