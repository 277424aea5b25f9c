#include "pbo/common/box.hpp"

#include "pbo/common/errors.hpp"

namespace pbo {

Box::Box(Eigen::VectorXd lower, Eigen::VectorXd upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) throw MalformedInput("box bounds have different dimensions");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!(upper_[i] > lower_[i])) throw MalformedInput("box upper bound must exceed lower bound");
  }
}

Eigen::VectorXd Box::to_unit(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw MalformedInput("dimension mismatch in Box::to_unit");
  return ((x - lower_).array() / (upper_ - lower_).array()).matrix();
}

Eigen::VectorXd Box::from_unit(const Eigen::VectorXd& u) const {
  if (u.size() != dim()) throw MalformedInput("dimension mismatch in Box::from_unit");
  return (lower_.array() + u.array() * (upper_ - lower_).array()).matrix();
}

bool Box::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != dim()) return false;
  for (Eigen::Index i = 0; i < dim(); ++i) {
    if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
  }
  return true;
}

Eigen::VectorXd clamp_unit(Eigen::VectorXd u) { return u.cwiseMax(0.0).cwiseMin(1.0); }

}  // namespace pbo
