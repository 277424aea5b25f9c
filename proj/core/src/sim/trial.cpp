#include "pbo/sim/trial.hpp"

#include "pbo/sim/controller.hpp"
#include "pbo/sim/dynamics.hpp"

namespace pbo::sim {

SliderState sample_initial_state(const PlantConfig& config, Rng& rng) {
  const SliderState& m = config.init_mean;
  const auto& sd = config.init_std;
  SliderState s;
  s.x = m.x + sd[0] * standard_normal(rng);
  s.y = m.y + sd[1] * standard_normal(rng);
  s.theta = wrap_angle(m.theta + sd[2] * standard_normal(rng));
  s.d = m.d + sd[3] * standard_normal(rng);
  return s;
}

Trajectory run_trial(const ControlParams& params, const PlantConfig& config, const SliderState& init, Rng& rng) {
  validate(params);
  validate(config);

  Trajectory traj;
  traj.params = params;
  traj.config_hash = config_hash(config);
  traj.dt = config.dt;
  traj.states.reserve(static_cast<std::size_t>(config.n_max));
  traj.states.push_back(init);

  ControllerMemory memory;
  for (;;) {
    const SliderState& current = traj.states.back();
    if (config.goal_distance(current) <= config.goal_radius) {
      traj.status = TrialStatus::GoalReached;
      break;
    }
    if (traj.n_steps() >= config.n_max) {
      traj.status = TrialStatus::OutOfTime;
      break;
    }
    const PusherCommand cmd = controller_step(current, config, params, memory);
    SliderState next = dynamics_step(current, cmd, config, rng);
    if (!config.workspace.contains(next.x, next.y)) {
      traj.status = TrialStatus::OutOfBounds;
      break;
    }
    traj.commands.push_back(cmd);
    traj.states.push_back(next);
  }
  traj.saturated = memory.saturated;
  return traj;
}

Trajectory run_trial(const ControlParams& params, const PlantConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  const SliderState init = sample_initial_state(config, rng);
  Trajectory traj = run_trial(params, config, init, rng);
  traj.seed = seed;
  return traj;
}

}  // namespace pbo::sim
