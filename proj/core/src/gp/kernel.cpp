#include "pbo/gp/kernel.hpp"

#include <cmath>

#include "pbo/common/errors.hpp"

namespace pbo::gp {
namespace {

double matern52(double r) {
  const double s = std::sqrt(5.0) * r;
  return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

KernelHyper KernelHyper::defaults(Eigen::Index dim, double lengthscale) {
  KernelHyper h;
  h.lengthscales = Eigen::VectorXd::Constant(dim, lengthscale);
  return h;
}

void KernelHyper::validate() const {
  if (!positive_finite(signal_variance)) throw MalformedInput("signal_variance must be positive");
  if (!positive_finite(noise_std)) throw MalformedInput("noise_std must be positive");
  if (lengthscales.size() == 0) throw MalformedInput("at least one lengthscale is required");
  for (Eigen::Index i = 0; i < lengthscales.size(); ++i) {
    if (!positive_finite(lengthscales[i])) throw MalformedInput("lengthscales must be positive");
  }
}

double kernel_eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const KernelHyper& hyper) {
  hyper.validate();
  if (x.size() != hyper.dim() || y.size() != hyper.dim()) throw MalformedInput("kernel input dimension mismatch");
  const double r = ((x - y).array() / hyper.lengthscales.array()).matrix().norm();
  return hyper.signal_variance * matern52(r);
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const KernelHyper& hyper) {
  hyper.validate();
  if ((A.rows() > 0 && A.cols() != hyper.dim()) || (B.rows() > 0 && B.cols() != hyper.dim())) {
    throw MalformedInput("kernel input dimension mismatch");
  }
  const Eigen::ArrayXd inv_ls = hyper.lengthscales.array().inverse();
  Eigen::MatrixXd K(A.rows(), B.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const Eigen::ArrayXd a = A.row(i).transpose().array() * inv_ls;
    for (Eigen::Index j = 0; j < B.rows(); ++j) {
      const double r = (a - B.row(j).transpose().array() * inv_ls).matrix().norm();
      K(i, j) = hyper.signal_variance * matern52(r);
    }
  }
  return K;
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& X, const KernelHyper& hyper) {
  Eigen::MatrixXd K = kernel_matrix(X, X, hyper);
  K = 0.5 * (K + K.transpose());
  K.diagonal().array() += kJitter * hyper.signal_variance;
  return K;
}

void to_json(nlohmann::json& j, const KernelHyper& h) {
  j = nlohmann::json{{"signal_variance", h.signal_variance},
                     {"lengthscales", std::vector<double>(h.lengthscales.data(), h.lengthscales.data() + h.dim())},
                     {"noise_std", h.noise_std}};
}

void from_json(const nlohmann::json& j, KernelHyper& h) {
  const auto ls = j.at("lengthscales").get<std::vector<double>>();
  h.signal_variance = j.at("signal_variance").get<double>();
  h.noise_std = j.at("noise_std").get<double>();
  h.lengthscales = Eigen::Map<const Eigen::VectorXd>(ls.data(), static_cast<Eigen::Index>(ls.size()));
  h.validate();
}

}  // namespace pbo::gp
