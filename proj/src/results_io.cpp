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

#include "binpick/results_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace binpick {
namespace {

using nlohmann::json;

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double from_num(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN()
                     : j.get<double>();
}

json stats_to_json(const std::vector<Stats>& stats) {
  json arr = json::array();
  for (const Stats& s : stats) {
    arr.push_back(
        {{"mean", num(s.mean)}, {"std", num(s.stddev)}, {"count", s.count}});
  }
  return arr;
}

std::vector<Stats> stats_from_json(const json& arr) {
  std::vector<Stats> out;
  for (const json& j : arr) {
    out.push_back({from_num(j.at("mean")), from_num(j.at("std")),
                   j.at("count").get<int>()});
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

std::string trials_csv(const std::vector<TrialResult>& trials) {
  std::ostringstream os;
  os << kTrialsHeader << '\n';
  for (const TrialResult& t : trials) {
    for (std::size_t k = 0; k < t.waypoints.size(); ++k) {
      const WaypointResult& w = t.waypoints[k];
      os << t.horizon << ',' << to_string(t.mode) << ',' << t.trial << ','
         << (k + 1) << ',' << (w.success ? 1 : 0) << ',';
      if (w.success) os << fixed(w.time_s) << ',' << fixed(w.path_m);
      else os << ',';
      os << '\n';
    }
  }
  return os.str();
}

std::string steps_csv(const std::vector<TrialResult>& trials) {
  std::ostringstream os;
  os << "horizon,mode,trial,step,sim_time_s,target_index,ee_x,ee_y,"
        "best_cost,nominal_cost,weight_entropy,rollouts,degenerate,wall_s\n";
  for (const TrialResult& t : trials) {
    for (const StepRecord& r : t.steps) {
      const StepDiagnostics& d = r.diagnostics;
      os << t.horizon << ',' << to_string(t.mode) << ',' << t.trial << ','
         << r.step << ',' << fixed(r.sim_time, 3) << ',' << r.target_index
         << ',' << fixed(r.ee.x()) << ',' << fixed(r.ee.y()) << ','
         << fixed(d.best_cost) << ',' << fixed(d.nominal_cost) << ','
         << fixed(d.weight_entropy) << ',' << d.rollout_count << ','
         << (d.degenerate ? 1 : 0) << ',' << fixed(d.wall_seconds, 9) << '\n';
    }
  }
  return os.str();
}

json cell_to_json(const CellSummary& c) {
  json rates = json::array();
  for (double r : c.success_rate) rates.push_back(num(r));
  return {{"horizon", c.horizon},
          {"mode", to_string(c.mode)},
          {"trials", c.trials},
          {"invalid_trials", c.invalid_trials},
          {"success_rate", rates},
          {"time_s", stats_to_json(c.time_s)},
          {"path_m", stats_to_json(c.path_m)},
          {"mean_step_wall_s", num(c.mean_step_wall_s)},
          {"p50_step_wall_s", num(c.p50_step_wall_s)},
          {"p95_step_wall_s", num(c.p95_step_wall_s)},
          {"rollout_count", c.rollout_count},
          {"control_steps", c.control_steps}};
}

CellSummary cell_from_json(const json& j) {
  CellSummary c;
  c.horizon = j.at("horizon").get<int>();
  c.mode = parse_mode(j.at("mode").get<std::string>());
  c.trials = j.at("trials").get<int>();
  c.invalid_trials = j.at("invalid_trials").get<int>();
  for (const json& r : j.at("success_rate")) c.success_rate.push_back(from_num(r));
  c.time_s = stats_from_json(j.at("time_s"));
  c.path_m = stats_from_json(j.at("path_m"));
  c.mean_step_wall_s = from_num(j.at("mean_step_wall_s"));
  c.p50_step_wall_s = from_num(j.at("p50_step_wall_s"));
  c.p95_step_wall_s = from_num(j.at("p95_step_wall_s"));
  c.rollout_count = j.at("rollout_count").get<long>();
  c.control_steps = j.at("control_steps").get<long>();
  return c;
}

void write_results(const ExperimentResult& results,
                   const ExperimentConfig& config,
                   const std::filesystem::path& out_dir, bool write_steps) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " +
                             out_dir.string() + ": " + ec.message());
  }
  write_file(out_dir / "trials.csv", trials_csv(results.trials));

  json summary;
  summary["config"] = to_json(config);
  summary["cells"] = json::array();
  for (const CellSummary& c : results.cells) {
    summary["cells"].push_back(cell_to_json(c));
  }
  summary["invalid_trials"] = results.invalid_trials;
  write_file(out_dir / "summary.json", summary.dump(2) + "\n");

  if (write_steps) write_file(out_dir / "steps.csv", steps_csv(results.trials));
}

std::vector<CellSummary> read_summary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const json doc = json::parse(in);
  std::vector<CellSummary> cells;
  for (const json& c : doc.at("cells")) cells.push_back(cell_from_json(c));
  return cells;
}

}  // namespace binpick
