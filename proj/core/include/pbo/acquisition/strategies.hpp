#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "pbo/acquisition/optimizer.hpp"
#include "pbo/common/random.hpp"
#include "pbo/gp/preference_model.hpp"
#include "pbo/gp/regression.hpp"

namespace pbo::acq {

inline constexpr std::string_view kEubo = "eubo";
inline constexpr std::string_view kDuelUcb = "duel_ucb";
inline constexpr std::string_view kDuelThompson = "duel_thompson";
inline constexpr std::string_view kEiig = "eiig";
inline constexpr std::string_view kHbEi = "hb_ei";
inline constexpr std::string_view kHbUcb = "hb_ucb";
inline constexpr std::string_view kMuc = "muc";
inline constexpr std::string_view kVanillaEi = "vanilla_ei";
inline constexpr std::string_view kVanillaUcb = "vanilla_ucb";
// Baseline: two independent uniform points.
inline constexpr std::string_view kRandom = "random";

// Strategies that propose duels from a preference model.
const std::vector<std::string>& dueling_strategies();
bool is_dueling_strategy(std::string_view id);

struct AcquisitionOptions {
  double beta = 4.0;    // UCB exploration weight
  double kappa = 1.0;   // EIIG entropy weight
  int thompson_grid = 1024;
  bool reflect_boundary = false;
  double reflect_scale = 0.05;
  OptimizerOptions optimizer;
};

struct DuelProposal {
  Eigen::VectorXd first;   // unit box
  Eigen::VectorXd second;  // unit box
  std::string strategy;
  double value = 0.0;               // acquisition value at the proposal
  bool first_is_incumbent = false;
  bool degenerate = false;          // first and second coincide
  bool at_boundary = false;         // second touches a face of the box
  bool fallback = false;            // strategy fell back to a random second point
};

double scalar_ei(double mean, double std, double best);
double scalar_ucb(double mean, double std, double beta);

// Training point with the highest posterior mean utility; lowest index on ties.
// Throws MalformedInput for a model without points.
Eigen::VectorXd incumbent(const gp::PreferenceModel& model);

// E[max(U(x1), U(x2))] under the bivariate predictive.
double eubo(const gp::PreferenceModel& model, const Eigen::VectorXd& x1, const Eigen::VectorXd& x2);
// Closed form from predictive moments. Throws NotPsdError if the difference
// variance is below -1e-10.
double eubo_from_moments(double mean1, double mean2, double var1, double var2, double cov);

// EIIG score of challenger moments against the incumbent: log p + kappa H(p).
double eiig_score(double mean, double mean_incumbent, double diff_var, double noise_std, double kappa);

DuelProposal propose_eubo(const gp::PreferenceModel& model, Rng& rng, const AcquisitionOptions& options = {});
DuelProposal propose_duel_ucb(const gp::PreferenceModel& model, Rng& rng, const AcquisitionOptions& options = {});
// `grid` overrides the quasi-random candidate grid when non-null. The chosen
// row is reported through `grid_index` when non-null.
DuelProposal propose_duel_thompson(const gp::PreferenceModel& model, Rng& rng, const AcquisitionOptions& options = {},
                                   const Eigen::MatrixXd* grid = nullptr, Eigen::Index* grid_index = nullptr);
DuelProposal propose_eiig(const gp::PreferenceModel& model, Rng& rng, const AcquisitionOptions& options = {});

enum class ScalarAcquisition { Ei, Ucb };

// Hallucination draw at the incumbent and the conditioned predictive.
struct Hallucination {
  Eigen::VectorXd incumbent;
  double value = 0.0;
  double mean = 0.0;  // predictive mean at the incumbent before conditioning
  double var = 0.0;
};
// Mean and variance at the rows of X after noise-free conditioning on h.
void conditioned_predictive(const gp::PreferenceModel& model, const Hallucination& h, const Eigen::MatrixXd& X,
                            Eigen::VectorXd& mean, Eigen::VectorXd& var);
DuelProposal propose_hb(const gp::PreferenceModel& model, ScalarAcquisition base, Rng& rng,
                        const AcquisitionOptions& options = {});
DuelProposal propose_muc(const gp::PreferenceModel& model, Rng& rng, const AcquisitionOptions& options = {});
DuelProposal propose_random(Eigen::Index dim, Rng& rng);

// Dispatch by strategy id. Throws MalformedInput for unknown ids.
DuelProposal propose(std::string_view strategy, const gp::PreferenceModel& model, Rng& rng,
                     const AcquisitionOptions& options = {});

// Next point for scalar-feedback BO on a regression model; `best` is the
// highest observed (standardized, utility-convention) value.
Eigen::VectorXd propose_scalar(const gp::GpRegression& model, ScalarAcquisition kind, double best, Rng& rng,
                               const AcquisitionOptions& options = {});

}  // namespace pbo::acq
