#pragma once

#include <Eigen/Core>
#include <vector>

namespace pbo {

// Axis-aligned box mapping raw parameter vectors to the unit cube and back.
class Box {
 public:
  Box() = default;
  Box(Eigen::VectorXd lower, Eigen::VectorXd upper);

  Eigen::Index dim() const { return lower_.size(); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }

  Eigen::VectorXd to_unit(const Eigen::VectorXd& x) const;
  Eigen::VectorXd from_unit(const Eigen::VectorXd& u) const;
  bool contains(const Eigen::VectorXd& x, double tol = 1e-12) const;

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

Eigen::VectorXd clamp_unit(Eigen::VectorXd u);

}  // namespace pbo
