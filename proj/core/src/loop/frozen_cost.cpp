#include "pbo/loop/frozen_cost.hpp"

#include "pbo/common/errors.hpp"
#include "pbo/gp/duel_set.hpp"

namespace pbo::loop {

using nlohmann::json;

FrozenCostModel::FrozenCostModel(gp::PreferenceModel model, Box bounds)
    : model_(std::move(model)), bounds_(std::move(bounds)) {
  if (model_.dim() != bounds_.dim()) throw MalformedInput("frozen model and bounds differ in dimension");
}

double FrozenCostModel::cost(const sim::ControlParams& params) const {
  return cost_unit(bounds_.to_unit(Eigen::VectorXd(params.to_vector())));
}

double FrozenCostModel::cost_unit(const Eigen::VectorXd& unit) const {
  return cost_unit(Eigen::MatrixXd(unit.transpose()))[0];
}

Eigen::VectorXd FrozenCostModel::cost_unit(const Eigen::MatrixXd& X) const { return -model_.predict_mean(X); }

FrozenCostModel extract_datadriven_cost(const std::vector<cost::Duel>& duels, const Box& bounds, std::uint64_t seed,
                                        const gp::HyperSearchOptions& options) {
  gp::DuelSet set(bounds.dim());
  for (const auto& d : duels) {
    const Eigen::VectorXd w = clamp_unit(bounds.to_unit(Eigen::VectorXd(d.winner.to_vector())));
    const Eigen::VectorXd l = clamp_unit(bounds.to_unit(Eigen::VectorXd(d.loser.to_vector())));
    if ((w - l).cwiseAbs().maxCoeff() <= gp::DuelSet::kMergeTolerance) continue;
    set.add_duel(w, l);
  }
  if (set.n_pairs() < 2) throw MalformedInput("data-driven cost needs at least two duels between distinct points");
  Rng rng = make_stream(seed, "hyper");
  const auto fit = gp::optimize_hyperparameters(set, gp::KernelHyper::defaults(bounds.dim()), rng, options);
  return FrozenCostModel(gp::fit_laplace(set, fit.hyper), bounds);
}

void to_json(json& j, const FrozenCostModel& m) {
  const auto& b = m.bounds();
  j = json{{"bounds",
            {{"lower", std::vector<double>(b.lower().begin(), b.lower().end())},
             {"upper", std::vector<double>(b.upper().begin(), b.upper().end())}}},
           {"model", m.model()}};
}

FrozenCostModel frozen_from_json(const json& j) {
  try {
    const auto lo = j.at("bounds").at("lower").get<std::vector<double>>();
    const auto hi = j.at("bounds").at("upper").get<std::vector<double>>();
    if (lo.size() != hi.size()) throw MalformedInput("frozen model bounds differ in size");
    Box box(Eigen::Map<const Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size())),
            Eigen::Map<const Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size())));
    return FrozenCostModel(gp::model_from_json(j.at("model")), std::move(box));
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("frozen model: ") + e.what());
  }
}

}  // namespace pbo::loop
