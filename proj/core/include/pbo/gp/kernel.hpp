#pragma once

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace pbo::gp {

// Diagonal jitter, relative to the signal variance.
inline constexpr double kJitter = 1e-8;

struct KernelHyper {
  double signal_variance = 1.0;
  Eigen::VectorXd lengthscales;  // normalized-input units
  double noise_std = 0.1;

  static KernelHyper defaults(Eigen::Index dim, double lengthscale = 0.5);
  Eigen::Index dim() const { return lengthscales.size(); }
  // Throws MalformedInput unless every value is strictly positive and finite.
  void validate() const;
  bool operator==(const KernelHyper& o) const {
    return signal_variance == o.signal_variance && noise_std == o.noise_std && lengthscales == o.lengthscales;
  }
};

// Matern-5/2 with ARD lengthscales.
double kernel_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const KernelHyper& hyper);

// Cross-covariance between the rows of A and the rows of B.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const KernelHyper& hyper);

// Symmetric Gram matrix of the rows of X, jitter included on the diagonal.
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& X, const KernelHyper& hyper);

void to_json(nlohmann::json& j, const KernelHyper& h);
void from_json(const nlohmann::json& j, KernelHyper& h);

}  // namespace pbo::gp
