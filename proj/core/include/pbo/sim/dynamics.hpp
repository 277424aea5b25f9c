#pragma once

#include "pbo/common/random.hpp"
#include "pbo/sim/types.hpp"

namespace pbo::sim {

// Time derivative of the slider state under the quasi-static ellipsoidal
// limit-surface model with a frictionless point pusher on the back edge:
//   v = u_x c^2 / (c^2 + d^2) along the push axis,
//   omega = -d u_x / (c^2 + d^2),
//   d' = u_y - (L/2) d u_x / (c^2 + d^2).
SliderState slider_rate(const SliderState& state, const PusherCommand& cmd, const PlantConfig& config);

// Noise-free propagation of the state over `duration` with `substeps` RK4 steps.
SliderState integrate(const SliderState& state, const PusherCommand& cmd, const PlantConfig& config,
                      double duration, int substeps);

// One control period: input noise, quasi-static propagation, pose noise, edge clamp.
SliderState dynamics_step(const SliderState& state, const PusherCommand& cmd, const PlantConfig& config, Rng& rng);

}  // namespace pbo::sim
