#pragma once

#include <nlohmann/json.hpp>

#include "pbo/sim/types.hpp"

namespace pbo::sim {

// Rounds to the two-decimal fixed precision used in exports.
double round2(double v);

void to_json(nlohmann::json& j, const ControlParams& p);
void from_json(const nlohmann::json& j, ControlParams& p);

void to_json(nlohmann::json& j, const PlantConfig& c);
void from_json(const nlohmann::json& j, PlantConfig& c);

// Export format: {params, config_hash, seed, status, dt, saturated,
// states: [[x, y, theta_deg, d], ...], commands: [[ux, uy], ...]} in cm / deg
// at two decimals.
void to_json(nlohmann::json& j, const Trajectory& t);
void from_json(const nlohmann::json& j, Trajectory& t);

}  // namespace pbo::sim
