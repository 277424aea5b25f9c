#include "pbo/sim/controller.hpp"

#include <algorithm>
#include <cmath>

namespace pbo::sim {

LoopGains LoopGains::from_time_constant(double tau) { return {1.0 / (tau * tau), 2.0 / tau}; }

CascadeGains CascadeGains::from_params(const ControlParams& p) {
  return {LoopGains::from_time_constant(p.tau_x), LoopGains::from_time_constant(p.tau_y),
          LoopGains::from_time_constant(p.tau_theta), LoopGains::from_time_constant(p.tau_d)};
}

double critically_damped_rate(double error, double error_rate, const LoopGains& gains, double dt) {
  // Repeated root of s^2 + kd s + kp at -kd/2.
  const double lambda = 0.5 * gains.kd;
  const double c = error_rate + lambda * error;
  const double next = (error + c * dt) * std::exp(-lambda * dt);
  return (next - error) / dt;
}

double offset_for_turn_ratio(double q, const PlantConfig& config) {
  // omega / u_x = -d / (c^2 + d^2); the magnitude peaks at |d| = c.
  const double c = config.limit_surface_ratio;
  const double d_max = std::min(c, config.half_edge());
  double d = 0.0;
  if (std::abs(q) < 1e-12) {
    d = 0.0;
  } else if (4.0 * q * q * c * c >= 1.0) {
    d = -std::copysign(c, q);
  } else {
    d = (-1.0 + std::sqrt(1.0 - 4.0 * q * q * c * c)) / (2.0 * q);
  }
  return std::clamp(d, -d_max, d_max);
}

PusherCommand controller_step(const SliderState& s, const PlantConfig& config, const ControlParams& params,
                              ControllerMemory& memory, CascadeSignals* signals) {
  const CascadeGains gains = CascadeGains::from_params(params);
  const double dt = config.dt;
  const double c2 = config.limit_surface_ratio * config.limit_surface_ratio;

  std::array<double, 4> error{};
  std::array<double, 4> rate{};
  // The derivative term uses the error rate commanded at the previous tick, so
  // each loop follows its own critically damped reference rather than
  // differentiating noisy measurements.
  auto derivative = [&](int loop) { return memory.primed ? memory.prev_rate[loop] : 0.0; };

  const double heading = s.theta + config.push_axis_offset;
  const double gx = config.goal_x - s.x;
  const double gy = config.goal_y - s.y;
  if (!memory.primed) {
    // The approach line runs from the first observed position to the goal.
    const double dist = std::hypot(gx, gy);
    memory.approach = dist > 1e-9 ? std::array<double, 2>{gx / dist, gy / dist}
                                  : std::array<double, 2>{std::cos(heading), std::sin(heading)};
  }

  // Position loop in the approach frame: a along the approach line, b to its left.
  const double ax = memory.approach[0];
  const double ay = memory.approach[1];
  error[ControllerMemory::kLongitudinal] = gx * ax + gy * ay;
  error[ControllerMemory::kLateral] = -gx * ay + gy * ax;
  rate[ControllerMemory::kLongitudinal] = derivative(ControllerMemory::kLongitudinal);
  rate[ControllerMemory::kLateral] = derivative(ControllerMemory::kLateral);
  const double r_long = critically_damped_rate(error[0], rate[0], gains.longitudinal, dt);
  const double r_lat = critically_damped_rate(error[1], rate[1], gains.lateral, dt);
  std::array<double, 4> commanded{r_long, r_lat, 0.0, 0.0};
  // Error e = (goal - p) . axis, so the desired velocity along each axis is -rate.
  const double vx = -r_long * ax + r_lat * ay;
  const double vy = -r_long * ay - r_lat * ax;

  const double speed = std::hypot(vx, vy);
  const double heading_ref = speed > 1e-9 ? std::atan2(vy, vx) : heading;
  const double speed_ref = std::max(0.0, vx * std::cos(heading) + vy * std::sin(heading));

  // Orientation loop: desired turn rate.
  error[ControllerMemory::kOrientation] = wrap_angle(heading_ref - heading);
  rate[ControllerMemory::kOrientation] = derivative(ControllerMemory::kOrientation);
  commanded[2] = critically_damped_rate(error[2], rate[2], gains.orientation, dt);
  const double omega_ref = -commanded[2];

  // Normal push speed that realises speed_ref at the current offset.
  double u_x = speed_ref * (1.0 + s.d * s.d / c2);
  const double offset_ref = u_x > 1e-9 ? offset_for_turn_ratio(omega_ref / u_x, config) : 0.0;

  // Contact loop: rate of the offset, plus cancellation of the slip the push induces.
  error[ControllerMemory::kContact] = offset_ref - s.d;
  rate[ControllerMemory::kContact] = derivative(ControllerMemory::kContact);
  commanded[3] = critically_damped_rate(error[3], rate[3], gains.contact, dt);
  const double d_rate_ref = -commanded[3];
  double u_y = d_rate_ref + config.half_edge() * s.d * u_x / (c2 + s.d * s.d);

  const double magnitude = std::hypot(u_x, u_y);
  if (magnitude > config.max_speed) {
    const double scale = config.max_speed / magnitude;
    u_x *= scale;
    u_y *= scale;
    memory.saturated = true;
  }
  u_x = std::max(0.0, u_x);

  memory.prev_error = error;
  memory.prev_rate = commanded;
  memory.primed = true;
  if (signals != nullptr) {
    *signals = {error, rate, heading_ref, speed_ref, omega_ref, offset_ref};
  }
  return {u_x, u_y};
}

}  // namespace pbo::sim
