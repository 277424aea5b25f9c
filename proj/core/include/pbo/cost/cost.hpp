#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "pbo/common/random.hpp"
#include "pbo/sim/types.hpp"

namespace pbo::cost {

// j1: push duration (s); j2: squared terminal distance to goal (cm^2);
// j3: integrated squared lateral contact velocity (cm^2/s).
struct CostTerms {
  double j1 = 0.0;
  double j2 = 0.0;
  double j3 = 0.0;

  bool operator==(const CostTerms&) const = default;
};

struct CostWeights {
  double a1 = 0.1;
  double a2 = 1.0;
  double a3 = 1.0;

  // Weights used by the simulated expert in the benchmark.
  static constexpr CostWeights expert() { return {0.1, 1.0, 1.0}; }
  // Weights refitted to the expert's choices on the physical setup.
  static constexpr CostWeights refined() { return {0.035, 7.5, 11.0}; }

  bool operator==(const CostWeights&) const = default;
};

void validate(const CostWeights& w);

CostTerms cost_terms(const sim::Trajectory& traj, const sim::PlantConfig& config);

double weighted_cost(const CostTerms& terms, const CostWeights& w);

enum class DuelSource { Oracle, Human };

std::string to_string(DuelSource source);
DuelSource duel_source_from_string(const std::string& s);

// One resolved comparison.
struct Duel {
  sim::ControlParams winner;
  sim::ControlParams loser;
  DuelSource source = DuelSource::Oracle;
  int iteration = 0;
  bool tie = false;
  bool winner_is_first = true;
  // (winner cost, loser cost) under the deciding weights, when known.
  std::optional<std::pair<double, double>> costs;
  // Termination status of the winner and loser trials, when simulated.
  std::optional<sim::TrialStatus> winner_status;
  std::optional<sim::TrialStatus> loser_status;
};

// Cost-based preference oracle: the trajectory with the lower weighted cost
// plus independent N(0, decision_noise_std^2) noise wins. Exact ties go to `a`.
Duel simulated_expert(const sim::Trajectory& a, const sim::Trajectory& b, const CostWeights& w,
                      const sim::PlantConfig& config, double decision_noise_std, Rng& rng);

void to_json(nlohmann::json& j, const CostTerms& t);
void from_json(const nlohmann::json& j, CostTerms& t);
void to_json(nlohmann::json& j, const CostWeights& w);
void from_json(const nlohmann::json& j, CostWeights& w);
// {winner_params, loser_params, source, iteration, tie, costs?, winner_status?, loser_status?}
void to_json(nlohmann::json& j, const Duel& d);
void from_json(const nlohmann::json& j, Duel& d);

}  // namespace pbo::cost
