#include "pbo/gp/regression.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "pbo/common/errors.hpp"
#include "pbo/common/simplex.hpp"

namespace pbo::gp {

GpRegression GpRegression::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const KernelHyper& hyper) {
  hyper.validate();
  if (X.rows() != y.size()) throw MalformedInput("regression inputs and targets differ in length");
  if (X.rows() > 0 && X.cols() != hyper.dim()) throw MalformedInput("regression input dimension mismatch");
  GpRegression m;
  m.hyper_ = hyper;
  m.train_ = X;
  Eigen::MatrixXd K = gram_matrix(X, hyper);
  K.diagonal().array() += hyper.noise_std * hyper.noise_std;
  m.llt_.compute(K);
  if (m.llt_.info() != Eigen::Success) throw NotPsdError("regression Gram matrix is not positive definite");
  m.alpha_ = m.llt_.solve(y);
  const Eigen::MatrixXd L = m.llt_.matrixL();
  m.log_ml_ = -0.5 * y.dot(m.alpha_) - L.diagonal().array().log().sum() -
              0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
  return m;
}

void GpRegression::predict(const Eigen::MatrixXd& X, Eigen::VectorXd& mean, Eigen::VectorXd& var) const {
  if (X.cols() != hyper_.dim()) throw MalformedInput("test points have the wrong dimension");
  var = Eigen::VectorXd::Constant(X.rows(), hyper_.signal_variance);
  if (train_.rows() == 0) {
    mean = Eigen::VectorXd::Zero(X.rows());
    return;
  }
  const Eigen::MatrixXd k_cross = kernel_matrix(train_, X, hyper_);
  mean = k_cross.transpose() * alpha_;
  Eigen::MatrixXd V = k_cross;
  llt_.matrixL().solveInPlace(V);
  var = (var - V.colwise().squaredNorm().transpose()).cwiseMax(0.0);
}

RegressionFit fit_regression_hyperparameters(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                             const KernelHyper& initial, Rng& rng,
                                             const HyperSearchOptions& options) {
  initial.validate();
  const Eigen::Index d = initial.dim();
  const HyperBounds& b = options.bounds;
  auto decode = [&](const Eigen::VectorXd& theta) {
    KernelHyper h = initial;
    h.lengthscales = theta.head(d).array().exp();
    h.noise_std = std::exp(theta[d]);
    return clamp_to_bounds(h, b);
  };
  auto objective = [&](const Eigen::VectorXd& theta) {
    try {
      return -GpRegression::fit(X, y, decode(theta)).log_marginal_likelihood();
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  double best_value = std::numeric_limits<double>::infinity();
  KernelHyper best = clamp_to_bounds(initial, b);
  for (int start = 0; start < std::max(1, options.starts); ++start) {
    Eigen::VectorXd theta0(d + 1);
    const KernelHyper h0 = clamp_to_bounds(initial, b);
    theta0.head(d) = h0.lengthscales.array().log();
    theta0[d] = std::log(h0.noise_std);
    if (start > 0) {
      for (Eigen::Index i = 0; i <= d; ++i) {
        const double lo = i < d ? b.lengthscale_min : b.noise_min;
        const double hi = i < d ? b.lengthscale_max : b.noise_max;
        theta0[i] = std::log(lo) + uniform01(rng) * (std::log(hi) - std::log(lo));
      }
    }
    const SimplexResult r = minimize_simplex(objective, theta0, 0.5, options.max_evaluations_per_start);
    const KernelHyper h = decode(r.x);
    const double value = objective(Eigen::VectorXd(
        (Eigen::VectorXd(d + 1) << h.lengthscales.array().log().matrix(), std::log(h.noise_std)).finished()));
    if (value < best_value) {
      best_value = value;
      best = h;
    }
  }
  if (!std::isfinite(best_value)) return {GpRegression::fit(X, y, KernelHyper::defaults(d)), true};
  return {GpRegression::fit(X, y, best), false};
}

}  // namespace pbo::gp
