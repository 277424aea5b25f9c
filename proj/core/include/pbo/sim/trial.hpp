#pragma once

#include <cstdint>

#include "pbo/common/random.hpp"
#include "pbo/sim/types.hpp"

namespace pbo::sim {

// Draws the initial pose from the configured per-component Gaussian.
SliderState sample_initial_state(const PlantConfig& config, Rng& rng);

// Runs controller + plant from `init` until the goal disc is reached, the
// slider leaves the workspace, or n_max states have been recorded.
// A step that would leave the workspace is not recorded; the trajectory ends
// at the last in-bounds state with status OutOfBounds.
Trajectory run_trial(const ControlParams& params, const PlantConfig& config, const SliderState& init, Rng& rng);

// Seeded convenience: samples the initial state and the plant noise from one
// stream derived from `seed`, and records the seed on the trajectory.
Trajectory run_trial(const ControlParams& params, const PlantConfig& config, std::uint64_t seed);

}  // namespace pbo::sim
