#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>

#include "pbo/acquisition/strategies.hpp"
#include "pbo/gp/hyper_search.hpp"
#include "pbo/loop/record.hpp"
#include "pbo/loop/run_config.hpp"

namespace pbo::loop {

struct ScalarBoOptions {
  int n_initial = 24;  // random samples before the first acquisition step
  int n_iterations = 15;
  acq::ScalarAcquisition acquisition = acq::ScalarAcquisition::Ei;
  double initial_lengthscale = 0.5;
  acq::AcquisitionOptions acquisition_options;
  gp::HyperSearchOptions hyper_search;
};

struct ScalarBoTrace {
  Eigen::MatrixXd points;  // unit box, one row per evaluation
  Eigen::VectorXd costs;
  std::vector<Eigen::Index> best;  // index of the best point after each evaluation
};

// GP-regression BO minimizing f over the unit box. Costs are standardized
// before each fit and the acquisition works on negated costs.
// `on_evaluation` is called after every evaluation with its row index.
ScalarBoTrace minimize_scalar(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::Index dim,
                              std::uint64_t seed, const ScalarBoOptions& options = {},
                              const std::function<void(Eigen::Index)>& on_evaluation = {});

using TrajectoryCost = std::function<double(const sim::Trajectory&)>;

// Scalar BO on the plant. config.strategy selects vanilla_ei or vanilla_ucb;
// the run starts from the same 2 * n_initial samples a preference run with
// the same seed uses, then spends n_iterations single experiments.
RunRecord run_vanilla_bo(const RunConfig& config, const TrajectoryCost& cost);

}  // namespace pbo::loop
