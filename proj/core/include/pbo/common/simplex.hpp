#pragma once

#include <functional>

#include <Eigen/Core>

namespace pbo {

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Derivative-free local minimization (Nelder-Mead simplex). Non-finite
// objective values are treated as a large penalty.
SimplexResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                               double initial_step, int max_evaluations, double size_tolerance = 1e-4);

}  // namespace pbo
