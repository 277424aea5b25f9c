#include "pbo/sim/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace pbo::sim {
namespace {

SliderState axpy(const SliderState& s, double h, const SliderState& k) {
  return {s.x + h * k.x, s.y + h * k.y, s.theta + h * k.theta, s.d + h * k.d};
}

}  // namespace

SliderState slider_rate(const SliderState& s, const PusherCommand& cmd, const PlantConfig& config) {
  const double c2 = config.limit_surface_ratio * config.limit_surface_ratio;
  const double den = c2 + s.d * s.d;
  const double v = cmd.u_x * c2 / den;
  const double heading = s.theta + config.push_axis_offset;
  return {v * std::cos(heading), v * std::sin(heading), -s.d * cmd.u_x / den,
          cmd.u_y - config.half_edge() * s.d * cmd.u_x / den};
}

SliderState integrate(const SliderState& state, const PusherCommand& cmd, const PlantConfig& config,
                      double duration, int substeps) {
  const double h = duration / substeps;
  SliderState s = state;
  for (int i = 0; i < substeps; ++i) {
    const SliderState k1 = slider_rate(s, cmd, config);
    const SliderState k2 = slider_rate(axpy(s, 0.5 * h, k1), cmd, config);
    const SliderState k3 = slider_rate(axpy(s, 0.5 * h, k2), cmd, config);
    const SliderState k4 = slider_rate(axpy(s, h, k3), cmd, config);
    s.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    s.y += h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    s.theta += h / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta);
    s.d += h / 6.0 * (k1.d + 2.0 * k2.d + 2.0 * k3.d + k4.d);
  }
  return s;
}

SliderState dynamics_step(const SliderState& state, const PusherCommand& cmd, const PlantConfig& config, Rng& rng) {
  // Draw order is fixed so that zero-noise configs consume the stream identically.
  const double n_ux = standard_normal(rng);
  const double n_uy = standard_normal(rng);
  const double n_x = standard_normal(rng);
  const double n_y = standard_normal(rng);
  const double n_theta = standard_normal(rng);

  PusherCommand applied{cmd.u_x + config.noise_std_input * n_ux, cmd.u_y + config.noise_std_input * n_uy};
  applied.u_x = std::max(0.0, applied.u_x);

  SliderState next = integrate(state, applied, config, config.dt, config.integration_substeps);
  next.x += config.noise_std_pose[0] * n_x;
  next.y += config.noise_std_pose[1] * n_y;
  next.theta = wrap_angle(next.theta + config.noise_std_pose[2] * n_theta);
  next.d = std::clamp(next.d, -config.half_edge(), config.half_edge());
  return next;
}

}  // namespace pbo::sim
