#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pbo/common/box.hpp"

namespace pbo::sim {

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Wraps an angle to (-pi, pi].
double wrap_angle(double rad);

// Kinematic state of the slider. Lengths in cm, theta in radians.
struct SliderState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double d = 0.0;  // contact offset along the pushed edge

  bool operator==(const SliderState&) const = default;
};

// Pusher velocity in the slider frame: u_x normal to the pushed edge, u_y along it (cm/s).
struct PusherCommand {
  double u_x = 0.0;
  double u_y = 0.0;

  bool operator==(const PusherCommand&) const = default;
};

// Time constants (s) of the four cascaded loops.
struct ControlParams {
  double tau_x = 1.0;
  double tau_y = 1.0;
  double tau_theta = 1.0;
  double tau_d = 1.0;

  Eigen::Vector4d to_vector() const { return {tau_x, tau_y, tau_theta, tau_d}; }
  static ControlParams from_vector(const Eigen::VectorXd& v);
  bool operator==(const ControlParams&) const = default;
};

// Admissible box for ControlParams: tau_x, tau_y in [1, 4] s; tau_theta, tau_d in [0.1, 2] s.
Box default_param_box();

// Throws BoundsError if any time constant is non-positive or outside the box.
void validate(const ControlParams& params, const Box& box = default_param_box());

struct Workspace {
  double x_min = -25.0;
  double x_max = 25.0;
  double y_min = -20.0;
  double y_max = 40.0;

  bool contains(double x, double y) const { return x >= x_min && x <= x_max && y >= y_min && y <= y_max; }
};

struct PlantConfig {
  double goal_x = 0.0;
  double goal_y = 30.0;
  double goal_radius = 2.0;
  double dt = 0.1;
  int n_max = 250;
  double block_edge = 10.0;
  Workspace workspace;
  // Per-step Gaussian noise on the pose (cm, cm, rad) and on each input component (cm/s).
  std::array<double, 3> noise_std_pose{0.2, 0.2, deg2rad(0.5)};
  double noise_std_input = 0.2;
  // Ellipsoidal limit surface: c = m_max / f_max, in cm.
  double limit_surface_ratio = 5.0;
  double max_speed = 10.0;
  // Pushing direction relative to the slider's orientation (rad).
  double push_axis_offset = deg2rad(180.0);
  int integration_substeps = 10;
  // Initial-state distribution (x, y in cm; theta in rad; d in cm).
  SliderState init_mean{4.74, -11.43, deg2rad(-50.19), 0.0};
  std::array<double, 4> init_std{0.32, 0.31, deg2rad(1.41), 0.0};

  double half_edge() const { return 0.5 * block_edge; }
  double goal_distance(const SliderState& s) const;
  // Copy with every noise source set to zero.
  PlantConfig noiseless() const;
};

// Throws MalformedInput when a structural invariant fails (goal_radius > 0, dt > 0, n_max >= 1, ...).
void validate(const PlantConfig& config);

// Stable hexadecimal fingerprint of a configuration.
std::string config_hash(const PlantConfig& config);

enum class TrialStatus { GoalReached, OutOfTime, OutOfBounds };

std::string to_string(TrialStatus status);
TrialStatus trial_status_from_string(const std::string& s);

struct Trajectory {
  ControlParams params;
  std::string config_hash;
  std::uint64_t seed = 0;
  double dt = 0.1;
  std::vector<SliderState> states;      // N entries, states[k] at t = k * dt
  std::vector<PusherCommand> commands;  // N - 1 entries
  TrialStatus status = TrialStatus::OutOfTime;
  bool saturated = false;               // command limit hit at least once

  int n_steps() const { return static_cast<int>(states.size()); }
  double duration() const { return (n_steps() - 1) * dt; }
};

}  // namespace pbo::sim
