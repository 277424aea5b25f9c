#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "pbo/common/random.hpp"
#include "pbo/gp/duel_set.hpp"
#include "pbo/gp/kernel.hpp"

namespace pbo::gp {

struct LaplaceOptions {
  double gradient_tolerance = 1e-6;
  int max_iterations = 100;
};

// Joint Gaussian predictive over a set of test points (utility convention:
// higher is better).
struct Prediction {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Marginal predictive of each test point, plus its covariance with one anchor.
struct Marginals {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;
  Eigen::VectorXd cov_anchor;
  double anchor_mean = 0.0;
  double anchor_var = 0.0;
};

// Bivariate predictive for matched rows of two point sets.
struct PairMarginals {
  Eigen::VectorXd mean1, mean2;
  Eigen::VectorXd var1, var2;
  Eigen::VectorXd cov;
};

// Pairwise-preference GP with a Laplace posterior. Immutable once built.
class PreferenceModel {
 public:
  const KernelHyper& hyper() const { return hyper_; }
  const DuelSet& duels() const { return duels_; }
  Eigen::Index dim() const { return hyper_.dim(); }
  std::size_t n_points() const { return duels_.n_points(); }

  // Latent utilities at the training points at the posterior mode.
  const Eigen::VectorXd& mode() const { return mode_; }
  // Cholesky factor of I + L K L^T, where W = L^T L is the likelihood curvature at the mode.
  const Eigen::LLT<Eigen::MatrixXd>& precision_factor() const { return b_factor_; }
  int iterations() const { return iterations_; }
  double gradient_norm() const { return gradient_norm_; }
  // Laplace approximation of log p(duels | hyper).
  double log_marginal_likelihood() const { return log_ml_; }

  // Points are rows of X (normalized inputs).
  Prediction predict(const Eigen::MatrixXd& X) const;
  // Same as predict, with the mean negated (lower is preferred).
  Prediction predict_cost(const Eigen::MatrixXd& X) const;
  Eigen::VectorXd predict_mean(const Eigen::MatrixXd& X) const;
  Marginals predict_marginals(const Eigen::MatrixXd& X, const Eigen::VectorXd& anchor) const;
  PairMarginals predict_pairs(const Eigen::MatrixXd& X1, const Eigen::MatrixXd& X2) const;

  // Builds the model at a given latent vector without searching for the mode.
  static PreferenceModel at_mode(DuelSet duels, KernelHyper hyper, Eigen::VectorXd mode);

 private:
  friend PreferenceModel fit_laplace(const DuelSet&, const KernelHyper&, const LaplaceOptions&);

  void assemble();
  // L K*^T for test inputs, given the cross-covariance K* (n x t).
  Eigen::MatrixXd project(const Eigen::MatrixXd& k_cross) const;

  KernelHyper hyper_;
  DuelSet duels_;
  Eigen::MatrixXd train_;     // n x dim
  Eigen::VectorXd mode_;      // n
  Eigen::VectorXd alpha_;     // gradient of the log-likelihood at the mode
  Eigen::MatrixXd sqrt_w_;    // m x n, W = sqrt_w^T sqrt_w
  Eigen::LLT<Eigen::MatrixXd> b_factor_;
  int iterations_ = 0;
  double gradient_norm_ = 0.0;
  double log_ml_ = 0.0;
};

// Damped Newton search for the posterior mode. Throws ConvergenceError when the
// iteration cap is hit with the gradient still above tolerance.
PreferenceModel fit_laplace(const DuelSet& duels, const KernelHyper& hyper, const LaplaceOptions& options = {});

// Unnormalized log-posterior of latent utilities u and its gradient.
double log_posterior(const DuelSet& duels, const KernelHyper& hyper, const Eigen::VectorXd& u);
Eigen::VectorXd log_posterior_gradient(const DuelSet& duels, const KernelHyper& hyper, const Eigen::VectorXd& u);

// One joint draw of the latent utility on the rows of X. Duplicate rows get
// identical values. Throws NotPsdError if the covariance cannot be factored.
Eigen::VectorXd sample_path(const PreferenceModel& model, const Eigen::MatrixXd& X, Rng& rng);

// Snapshot {hyper, points, pairs, mode}; loading rebuilds the curvature at the stored mode.
void to_json(nlohmann::json& j, const PreferenceModel& m);
PreferenceModel model_from_json(const nlohmann::json& j);

}  // namespace pbo::gp
