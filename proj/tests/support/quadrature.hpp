#pragma once

// Brute-force posterior moments of a probit preference model over a handful
// of latent values, by dense tensor-grid quadrature. Independent of the
// Laplace machinery: only the prior covariance and the duel list are shared.

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace pbo::oracle {

inline double matern52_1d(double a, double b, double lengthscale, double signal_variance) {
  const double s = std::sqrt(5.0) * std::abs(a - b) / lengthscale;
  return signal_variance * (1.0 + s + s * s / 3.0) * std::exp(-s);
}

struct QuadratureResult {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Exact posterior mean/covariance of u ~ N(0, K) given probit duels
// (winner, loser) with noise sigma. Grid of `nodes` points per axis over
// +-half_width prior standard deviations, in the whitened coordinates u = L z.
inline QuadratureResult probit_posterior_quadrature(const Eigen::MatrixXd& K,
                                                    const std::vector<std::pair<int, int>>& duels, double sigma,
                                                    int nodes, double half_width = 7.0) {
  const auto n = K.rows();
  const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(K).matrixL();
  const double h = 2.0 * half_width / (nodes - 1);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  double mass = 0.0;
  Eigen::VectorXd first = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd z(n);
  for (;;) {
    for (Eigen::Index i = 0; i < n; ++i) z[i] = -half_width + h * idx[static_cast<std::size_t>(i)];
    const Eigen::VectorXd u = L * z;
    double log_w = -0.5 * z.squaredNorm();
    for (const auto& [w, l] : duels) {
      const double arg = (u[w] - u[l]) / (std::numbers::sqrt2 * sigma);
      log_w += std::log(0.5 * std::erfc(-arg / std::numbers::sqrt2));
    }
    const double weight = std::exp(log_w);
    mass += weight;
    first += weight * u;
    second += weight * u * u.transpose();
    Eigen::Index k = 0;
    while (k < n && ++idx[static_cast<std::size_t>(k)] == nodes) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == n) break;
  }
  QuadratureResult r;
  r.mean = first / mass;
  r.cov = second / mass - r.mean * r.mean.transpose();
  return r;
}

}  // namespace pbo::oracle
