#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "pbo/common/random.hpp"
#include "pbo/gp/hyper_search.hpp"
#include "pbo/gp/kernel.hpp"

namespace pbo::gp {

// Exact GP regression with Gaussian observation noise (hyper.noise_std).
// Used by the scalar-feedback baseline.
class GpRegression {
 public:
  // X holds inputs as rows; throws MalformedInput on size mismatch.
  static GpRegression fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const KernelHyper& hyper);

  const KernelHyper& hyper() const { return hyper_; }
  double log_marginal_likelihood() const { return log_ml_; }

  // Latent-function mean and variance at the rows of X.
  void predict(const Eigen::MatrixXd& X, Eigen::VectorXd& mean, Eigen::VectorXd& var) const;

 private:
  KernelHyper hyper_;
  Eigen::MatrixXd train_;
  Eigen::VectorXd alpha_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_ml_ = 0.0;
};

struct RegressionFit {
  GpRegression model;
  bool used_defaults = false;
};

// Multi-start search over log lengthscales and log noise, signal variance fixed.
RegressionFit fit_regression_hyperparameters(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                             const KernelHyper& initial, Rng& rng,
                                             const HyperSearchOptions& options = {});

}  // namespace pbo::gp
