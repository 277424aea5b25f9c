#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace pbo::gp {

// Training data of the preference model: distinct points in the unit box and
// (winner, loser) index pairs into them.
class DuelSet {
 public:
  static constexpr double kMergeTolerance = 1e-6;

  DuelSet() = default;
  explicit DuelSet(Eigen::Index dim) : dim_(dim) {}

  Eigen::Index dim() const { return dim_; }
  std::size_t n_points() const { return points_.size(); }
  std::size_t n_pairs() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

  const std::vector<Eigen::VectorXd>& points() const { return points_; }
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  // Points stacked as rows.
  Eigen::MatrixXd point_matrix() const;

  // Index of an existing point within kMergeTolerance (max-norm), or a new one.
  int add_point(const Eigen::VectorXd& x);
  // Returns the index of the point within kMergeTolerance, or -1.
  int find_point(const Eigen::VectorXd& x) const;

  // Throws MalformedInput if the two points coincide or leave the unit box.
  void add_duel(const Eigen::VectorXd& winner, const Eigen::VectorXd& loser);
  void add_pair(int winner, int loser);

 private:
  Eigen::Index dim_ = 0;
  std::vector<Eigen::VectorXd> points_;
  std::vector<std::pair<int, int>> pairs_;
};

}  // namespace pbo::gp
