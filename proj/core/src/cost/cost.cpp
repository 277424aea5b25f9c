#include "pbo/cost/cost.hpp"

#include <cmath>

#include "pbo/common/errors.hpp"
#include "pbo/sim/json.hpp"

namespace pbo::cost {

using nlohmann::json;

void validate(const CostWeights& w) {
  if (w.a1 < 0.0 || w.a2 < 0.0 || w.a3 < 0.0) throw MalformedInput("cost weights must be non-negative");
  if (!(w.a1 > 0.0 || w.a2 > 0.0 || w.a3 > 0.0)) throw MalformedInput("at least one cost weight must be positive");
}

CostTerms cost_terms(const sim::Trajectory& traj, const sim::PlantConfig& config) {
  const int n = traj.n_steps();
  if (n < 1) throw MalformedInput("trajectory has no states");
  if (traj.commands.size() + 1 != traj.states.size()) {
    throw MalformedInput("trajectory must hold N states and N-1 commands");
  }
  const double dt = config.dt;
  CostTerms t;
  t.j1 = (n - 1) * dt;
  const auto& last = traj.states.back();
  const double ex = last.x - config.goal_x;
  const double ey = last.y - config.goal_y;
  t.j2 = ex * ex + ey * ey;
  for (int k = 1; k < n; ++k) {
    const double v = (traj.states[k].d - traj.states[k - 1].d) / dt;
    t.j3 += v * v * dt;
  }
  return t;
}

double weighted_cost(const CostTerms& t, const CostWeights& w) { return w.a1 * t.j1 + w.a2 * t.j2 + w.a3 * t.j3; }

std::string to_string(DuelSource source) { return source == DuelSource::Oracle ? "oracle" : "human"; }

DuelSource duel_source_from_string(const std::string& s) {
  if (s == "oracle") return DuelSource::Oracle;
  if (s == "human") return DuelSource::Human;
  throw MalformedInput("unknown duel source '" + s + "'");
}

Duel simulated_expert(const sim::Trajectory& a, const sim::Trajectory& b, const CostWeights& w,
                      const sim::PlantConfig& config, double decision_noise_std, Rng& rng) {
  const std::string hash = sim::config_hash(config);
  if (a.config_hash != hash || b.config_hash != hash) {
    throw MalformedInput("simulated_expert: trajectories come from different plant configurations");
  }
  if (decision_noise_std < 0.0) throw MalformedInput("decision noise must be non-negative");
  const double cost_a = weighted_cost(cost_terms(a, config), w);
  const double cost_b = weighted_cost(cost_terms(b, config), w);
  // Always draw both so the stream advances identically with or without noise.
  const double noisy_a = cost_a + decision_noise_std * standard_normal(rng);
  const double noisy_b = cost_b + decision_noise_std * standard_normal(rng);

  Duel d;
  d.source = DuelSource::Oracle;
  d.tie = noisy_a == noisy_b;
  d.winner_is_first = noisy_a <= noisy_b;
  if (d.winner_is_first) {
    d.winner = a.params;
    d.loser = b.params;
    d.costs = std::make_pair(cost_a, cost_b);
    d.winner_status = a.status;
    d.loser_status = b.status;
  } else {
    d.winner = b.params;
    d.loser = a.params;
    d.costs = std::make_pair(cost_b, cost_a);
    d.winner_status = b.status;
    d.loser_status = a.status;
  }
  return d;
}

void to_json(json& j, const CostTerms& t) { j = json{{"j1", t.j1}, {"j2", t.j2}, {"j3", t.j3}}; }

void from_json(const json& j, CostTerms& t) {
  t.j1 = j.at("j1").get<double>();
  t.j2 = j.at("j2").get<double>();
  t.j3 = j.at("j3").get<double>();
}

void to_json(json& j, const CostWeights& w) { j = json::array({w.a1, w.a2, w.a3}); }

void from_json(const json& j, CostWeights& w) {
  if (!j.is_array() || j.size() != 3) throw MalformedInput("cost weights must be an array of 3 numbers");
  w = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  validate(w);
}

void to_json(json& j, const Duel& d) {
  j = json{{"winner_params", d.winner}, {"loser_params", d.loser},       {"source", to_string(d.source)},
           {"iteration", d.iteration},  {"tie", d.tie},                   {"winner_is_first", d.winner_is_first}};
  if (d.costs) j["costs"] = {d.costs->first, d.costs->second};
  if (d.winner_status) j["winner_status"] = sim::to_string(*d.winner_status);
  if (d.loser_status) j["loser_status"] = sim::to_string(*d.loser_status);
}

void from_json(const json& j, Duel& d) {
  d = Duel{};
  d.winner = j.at("winner_params").get<sim::ControlParams>();
  d.loser = j.at("loser_params").get<sim::ControlParams>();
  d.source = duel_source_from_string(j.at("source").get<std::string>());
  d.iteration = j.at("iteration").get<int>();
  d.tie = j.value("tie", false);
  d.winner_is_first = j.value("winner_is_first", true);
  if (j.contains("costs") && !j["costs"].is_null()) {
    d.costs = std::make_pair(j["costs"].at(0).get<double>(), j["costs"].at(1).get<double>());
  }
  if (j.contains("winner_status")) d.winner_status = sim::trial_status_from_string(j["winner_status"].get<std::string>());
  if (j.contains("loser_status")) d.loser_status = sim::trial_status_from_string(j["loser_status"].get<std::string>());
}

}  // namespace pbo::cost
