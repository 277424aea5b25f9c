#include "pbo/sim/json.hpp"

#include <cmath>

#include "pbo/common/errors.hpp"

namespace pbo::sim {

using nlohmann::json;

double round2(double v) {
  const double r = std::round(v * 100.0) / 100.0;
  return r == 0.0 ? 0.0 : r;  // no "-0.0" in exports
}

void to_json(json& j, const ControlParams& p) {
  j = json{{"tau_x", p.tau_x}, {"tau_y", p.tau_y}, {"tau_theta", p.tau_theta}, {"tau_d", p.tau_d}};
}

void from_json(const json& j, ControlParams& p) {
  if (j.is_array()) {
    if (j.size() != 4) throw MalformedInput("params array must have 4 entries");
    p = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
    return;
  }
  p.tau_x = j.at("tau_x").get<double>();
  p.tau_y = j.at("tau_y").get<double>();
  p.tau_theta = j.at("tau_theta").get<double>();
  p.tau_d = j.at("tau_d").get<double>();
}

void to_json(json& j, const PlantConfig& c) {
  j = json{{"goal", {c.goal_x, c.goal_y}},
           {"goal_radius", c.goal_radius},
           {"dt", c.dt},
           {"n_max", c.n_max},
           {"block_edge", c.block_edge},
           {"workspace", {c.workspace.x_min, c.workspace.x_max, c.workspace.y_min, c.workspace.y_max}},
           {"noise_std_pose", {c.noise_std_pose[0], c.noise_std_pose[1], rad2deg(c.noise_std_pose[2])}},
           {"noise_std_input", c.noise_std_input},
           {"limit_surface_ratio", c.limit_surface_ratio},
           {"max_speed", c.max_speed},
           {"push_axis_offset_deg", rad2deg(c.push_axis_offset)},
           {"integration_substeps", c.integration_substeps},
           {"init_mean", {c.init_mean.x, c.init_mean.y, rad2deg(c.init_mean.theta), c.init_mean.d}},
           {"init_std", {c.init_std[0], c.init_std[1], rad2deg(c.init_std[2]), c.init_std[3]}}};
}

void from_json(const json& j, PlantConfig& c) {
  c = PlantConfig{};
  if (j.contains("goal")) {
    c.goal_x = j["goal"].at(0).get<double>();
    c.goal_y = j["goal"].at(1).get<double>();
  }
  if (j.contains("goal_radius")) c.goal_radius = j["goal_radius"].get<double>();
  if (j.contains("dt")) c.dt = j["dt"].get<double>();
  if (j.contains("n_max")) c.n_max = j["n_max"].get<int>();
  if (j.contains("block_edge")) c.block_edge = j["block_edge"].get<double>();
  if (j.contains("workspace")) {
    const auto& w = j["workspace"];
    c.workspace = {w.at(0).get<double>(), w.at(1).get<double>(), w.at(2).get<double>(), w.at(3).get<double>()};
  }
  if (j.contains("noise_std_pose")) {
    const auto& n = j["noise_std_pose"];
    c.noise_std_pose = {n.at(0).get<double>(), n.at(1).get<double>(), deg2rad(n.at(2).get<double>())};
  }
  if (j.contains("noise_std_input")) c.noise_std_input = j["noise_std_input"].get<double>();
  if (j.contains("limit_surface_ratio")) c.limit_surface_ratio = j["limit_surface_ratio"].get<double>();
  if (j.contains("max_speed")) c.max_speed = j["max_speed"].get<double>();
  if (j.contains("push_axis_offset_deg")) c.push_axis_offset = deg2rad(j["push_axis_offset_deg"].get<double>());
  if (j.contains("integration_substeps")) c.integration_substeps = j["integration_substeps"].get<int>();
  if (j.contains("init_mean")) {
    const auto& m = j["init_mean"];
    c.init_mean = {m.at(0).get<double>(), m.at(1).get<double>(), deg2rad(m.at(2).get<double>()),
                   m.at(3).get<double>()};
  }
  if (j.contains("init_std")) {
    const auto& s = j["init_std"];
    c.init_std = {s.at(0).get<double>(), s.at(1).get<double>(), deg2rad(s.at(2).get<double>()),
                  s.at(3).get<double>()};
  }
  validate(c);
}

void to_json(json& j, const Trajectory& t) {
  json states = json::array();
  for (const auto& s : t.states) {
    states.push_back({round2(s.x), round2(s.y), round2(rad2deg(s.theta)), round2(s.d)});
  }
  json commands = json::array();
  for (const auto& u : t.commands) commands.push_back({round2(u.u_x), round2(u.u_y)});
  j = json{{"params", t.params},         {"config_hash", t.config_hash}, {"seed", t.seed},
           {"status", to_string(t.status)}, {"dt", t.dt},                {"saturated", t.saturated},
           {"states", std::move(states)},   {"commands", std::move(commands)}};
}

void from_json(const json& j, Trajectory& t) {
  t = Trajectory{};
  t.params = j.at("params").get<ControlParams>();
  t.config_hash = j.value("config_hash", std::string{});
  t.seed = j.value("seed", std::uint64_t{0});
  t.status = trial_status_from_string(j.at("status").get<std::string>());
  t.dt = j.at("dt").get<double>();
  t.saturated = j.value("saturated", false);
  for (const auto& s : j.at("states")) {
    if (s.size() != 4) throw MalformedInput("trajectory state must have 4 components");
    t.states.push_back({s[0].get<double>(), s[1].get<double>(), deg2rad(s[2].get<double>()), s[3].get<double>()});
  }
  for (const auto& u : j.at("commands")) {
    if (u.size() != 2) throw MalformedInput("trajectory command must have 2 components");
    t.commands.push_back({u[0].get<double>(), u[1].get<double>()});
  }
  if (t.states.empty() || t.commands.size() + 1 != t.states.size()) {
    throw MalformedInput("trajectory must hold N states and N-1 commands");
  }
}

}  // namespace pbo::sim
