#include "pbo/sim/types.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "pbo/common/errors.hpp"

namespace pbo::sim {

double wrap_angle(double rad) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(rad, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  if (r > std::numbers::pi) r -= two_pi;
  return r;
}

ControlParams ControlParams::from_vector(const Eigen::VectorXd& v) {
  if (v.size() != 4) throw MalformedInput("control parameter vector must have 4 entries");
  return {v[0], v[1], v[2], v[3]};
}

Box default_param_box() {
  Eigen::VectorXd lo(4), hi(4);
  lo << 1.0, 1.0, 0.1, 0.1;
  hi << 4.0, 4.0, 2.0, 2.0;
  return {lo, hi};
}

void validate(const ControlParams& params, const Box& box) {
  const Eigen::Vector4d v = params.to_vector();
  for (int i = 0; i < 4; ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
      throw BoundsError("time constant " + std::to_string(i) + " must be strictly positive");
    }
  }
  if (!box.contains(v, 1e-9)) {
    std::ostringstream os;
    os << "control parameters (" << v.transpose() << ") outside the admissible box";
    throw BoundsError(os.str());
  }
}

double PlantConfig::goal_distance(const SliderState& s) const { return std::hypot(s.x - goal_x, s.y - goal_y); }

PlantConfig PlantConfig::noiseless() const {
  PlantConfig c = *this;
  c.noise_std_pose = {0.0, 0.0, 0.0};
  c.noise_std_input = 0.0;
  c.init_std = {0.0, 0.0, 0.0, 0.0};
  return c;
}

void validate(const PlantConfig& c) {
  if (!(c.goal_radius > 0.0)) throw MalformedInput("goal_radius must be positive");
  if (!(c.dt > 0.0)) throw MalformedInput("dt must be positive");
  if (c.n_max < 1) throw MalformedInput("n_max must be at least 1");
  if (!(c.block_edge > 0.0)) throw MalformedInput("block_edge must be positive");
  if (!(c.limit_surface_ratio > 0.0)) throw MalformedInput("limit_surface_ratio must be positive");
  if (!(c.max_speed > 0.0)) throw MalformedInput("max_speed must be positive");
  if (c.integration_substeps < 1) throw MalformedInput("integration_substeps must be at least 1");
  if (!(c.workspace.x_max > c.workspace.x_min) || !(c.workspace.y_max > c.workspace.y_min)) {
    throw MalformedInput("workspace rectangle is empty");
  }
}

std::string config_hash(const PlantConfig& c) {
  std::ostringstream os;
  os << std::setprecision(17) << c.goal_x << ',' << c.goal_y << ',' << c.goal_radius << ',' << c.dt << ','
     << c.n_max << ',' << c.block_edge << ',' << c.workspace.x_min << ',' << c.workspace.x_max << ','
     << c.workspace.y_min << ',' << c.workspace.y_max << ',' << c.noise_std_pose[0] << ','
     << c.noise_std_pose[1] << ',' << c.noise_std_pose[2] << ',' << c.noise_std_input << ','
     << c.limit_surface_ratio << ',' << c.max_speed << ',' << c.push_axis_offset << ','
     << c.integration_substeps << ',' << c.init_mean.x << ','
     << c.init_mean.y << ',' << c.init_mean.theta << ',' << c.init_mean.d;
  for (double s : c.init_std) os << ',' << s;
  // FNV-1a over the canonical text.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << h;
  return hex.str();
}

std::string to_string(TrialStatus status) {
  switch (status) {
    case TrialStatus::GoalReached:
      return "GoalReached";
    case TrialStatus::OutOfTime:
      return "OutOfTime";
    case TrialStatus::OutOfBounds:
      return "OutOfBounds";
  }
  return "OutOfTime";
}

TrialStatus trial_status_from_string(const std::string& s) {
  if (s == "GoalReached") return TrialStatus::GoalReached;
  if (s == "OutOfTime") return TrialStatus::OutOfTime;
  if (s == "OutOfBounds") return TrialStatus::OutOfBounds;
  throw MalformedInput("unknown trial status '" + s + "'");
}

}  // namespace pbo::sim
