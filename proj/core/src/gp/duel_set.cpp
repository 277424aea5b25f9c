#include "pbo/gp/duel_set.hpp"

#include "pbo/common/errors.hpp"

namespace pbo::gp {

Eigen::MatrixXd DuelSet::point_matrix() const {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(points_.size()), dim_);
  for (std::size_t i = 0; i < points_.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = points_[i].transpose();
  return X;
}

int DuelSet::find_point(const Eigen::VectorXd& x) const {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if ((points_[i] - x).cwiseAbs().maxCoeff() <= kMergeTolerance) return static_cast<int>(i);
  }
  return -1;
}

int DuelSet::add_point(const Eigen::VectorXd& x) {
  if (x.size() != dim_) throw MalformedInput("duel point has the wrong dimension");
  if ((x.array() < -1e-12).any() || (x.array() > 1.0 + 1e-12).any()) {
    throw MalformedInput("duel points must lie in the unit box");
  }
  if (const int found = find_point(x); found >= 0) return found;
  points_.push_back(x);
  return static_cast<int>(points_.size()) - 1;
}

void DuelSet::add_duel(const Eigen::VectorXd& winner, const Eigen::VectorXd& loser) {
  if (winner.size() == loser.size() && (winner - loser).cwiseAbs().maxCoeff() <= kMergeTolerance) {
    throw MalformedInput("a duel needs two distinct points");
  }
  const int w = add_point(winner);
  const int l = add_point(loser);
  add_pair(w, l);
}

void DuelSet::add_pair(int winner, int loser) {
  const int n = static_cast<int>(points_.size());
  if (winner < 0 || loser < 0 || winner >= n || loser >= n) throw MalformedInput("duel index out of range");
  if (winner == loser) throw MalformedInput("winner and loser must differ");
  pairs_.emplace_back(winner, loser);
}

}  // namespace pbo::gp
