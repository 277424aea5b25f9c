#pragma once

#include <array>

#include "pbo/sim/types.hpp"

namespace pbo::sim {

// PD gains of one loop. The time constant fixes both gains so that the
// closed-loop error decays critically damped: kp = 1 / tau^2, kd = 2 / tau.
struct LoopGains {
  double kp = 1.0;
  double kd = 2.0;

  static LoopGains from_time_constant(double tau);
};

struct CascadeGains {
  LoopGains longitudinal;  // tau_x
  LoopGains lateral;       // tau_y
  LoopGains orientation;   // tau_theta
  LoopGains contact;       // tau_d

  static CascadeGains from_params(const ControlParams& params);
};

// Per-loop error memory: the error measured and the error rate commanded at
// the previous tick. The commanded rate serves as the derivative estimate.
struct ControllerMemory {
  enum Loop { kLongitudinal = 0, kLateral = 1, kOrientation = 2, kContact = 3 };
  std::array<double, 4> prev_error{};
  std::array<double, 4> prev_rate{};
  std::array<double, 2> approach{0.0, 1.0};  // unit vector, fixed on the first tick
  bool primed = false;
  bool saturated = false;
};

// Average error rate over the next dt that keeps the error on the critically
// damped trajectory e'' + kd e' + kp e = 0 starting from (error, error_rate).
double critically_damped_rate(double error, double error_rate, const LoopGains& gains, double dt);

// Intermediate signals of one controller tick, exposed for tests and logging.
struct CascadeSignals {
  std::array<double, 4> error{};
  std::array<double, 4> error_rate{};
  double heading_ref = 0.0;
  double speed_ref = 0.0;
  double turn_rate_ref = 0.0;
  double offset_ref = 0.0;
};

// One tick of the position -> orientation -> contact-offset cascade.
PusherCommand controller_step(const SliderState& state, const PlantConfig& config, const ControlParams& params,
                              ControllerMemory& memory, CascadeSignals* signals = nullptr);

// Contact offset that produces the requested turn rate per unit normal push
// speed on the ellipsoidal limit surface, clamped to the reachable range.
double offset_for_turn_ratio(double turn_per_push, const PlantConfig& config);

}  // namespace pbo::sim
