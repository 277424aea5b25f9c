#pragma once

#include <functional>

#include <Eigen/Core>

#include "pbo/common/random.hpp"

namespace pbo::acq {

// Batch objective: one value per row of the input matrix.
using BatchObjective = std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>;

struct OptimizerOptions {
  int candidates = 256;
  int polish_starts = 8;  // best-scoring candidates refined by coordinate search
  int polish_iterations = 50;
  double initial_step = 0.1;
  double shrink = 0.5;
};

struct BoxMaximum {
  Eigen::VectorXd x;
  double value = 0.0;
  int candidate = 0;  // index of the quasi-random start it came from
};

// n points of a Halton sequence in [0,1]^dim, shifted modulo 1 by a uniform
// offset drawn from rng (Cranley-Patterson rotation).
Eigen::MatrixXd shifted_halton(int n, Eigen::Index dim, Rng& rng);

// Maximizes f over the unit box. Ties resolve to the lowest candidate index.
BoxMaximum maximize_unit_box(const BatchObjective& f, Eigen::Index dim, Rng& rng,
                             const OptimizerOptions& options = {});

}  // namespace pbo::acq
