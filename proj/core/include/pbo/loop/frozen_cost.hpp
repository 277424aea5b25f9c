#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "pbo/common/box.hpp"
#include "pbo/cost/cost.hpp"
#include "pbo/gp/hyper_search.hpp"
#include "pbo/gp/preference_model.hpp"
#include "pbo/sim/types.hpp"

namespace pbo::loop {

// A preference model used as a fixed scalar cost: cost = -posterior mean utility.
class FrozenCostModel {
 public:
  FrozenCostModel(gp::PreferenceModel model, Box bounds);

  const gp::PreferenceModel& model() const { return model_; }
  const Box& bounds() const { return bounds_; }

  double cost(const sim::ControlParams& params) const;
  double cost_unit(const Eigen::VectorXd& unit) const;
  // Rows of X in the unit box.
  Eigen::VectorXd cost_unit(const Eigen::MatrixXd& X) const;

 private:
  gp::PreferenceModel model_;
  Box bounds_;
};

// Fits hyperparameters and the Laplace posterior once on every duel, then
// freezes the result. Duels between coinciding points are skipped. Requires
// at least two usable duels.
FrozenCostModel extract_datadriven_cost(const std::vector<cost::Duel>& duels, const Box& bounds,
                                        std::uint64_t seed = 0, const gp::HyperSearchOptions& options = {});

void to_json(nlohmann::json& j, const FrozenCostModel& m);
FrozenCostModel frozen_from_json(const nlohmann::json& j);

}  // namespace pbo::loop
