#include "pbo/gp/preference_model.hpp"

#include <cmath>
#include <limits>

#include "pbo/common/errors.hpp"
#include "pbo/gp/likelihood.hpp"

namespace pbo::gp {
namespace {

struct LikelihoodState {
  double log_lik = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd sqrt_w;  // m x n
};

LikelihoodState likelihood_state(const DuelSet& duels, double noise_std, const Eigen::VectorXd& u) {
  const auto n = static_cast<Eigen::Index>(duels.n_points());
  const auto m = static_cast<Eigen::Index>(duels.n_pairs());
  LikelihoodState s;
  s.grad = Eigen::VectorXd::Zero(n);
  s.sqrt_w = Eigen::MatrixXd::Zero(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto [w, l] = duels.pairs()[static_cast<std::size_t>(i)];
    const PairTerms t = pref_log_likelihood(u[w], u[l], noise_std);
    s.log_lik += t.log_lik;
    s.grad[w] += t.grad;
    s.grad[l] -= t.grad;
    const double root = std::sqrt(std::max(t.curv, 0.0));
    s.sqrt_w(i, w) = root;
    s.sqrt_w(i, l) = -root;
  }
  return s;
}

void check_inputs(const DuelSet& duels, const KernelHyper& hyper) {
  hyper.validate();
  if (duels.dim() != hyper.dim()) throw MalformedInput("duel dimension does not match the kernel");
}

Eigen::LLT<Eigen::MatrixXd> factor_b(const Eigen::MatrixXd& sqrt_w, const Eigen::MatrixXd& K) {
  Eigen::MatrixXd B = sqrt_w * K * sqrt_w.transpose();
  B = 0.5 * (B + B.transpose());
  B.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success) throw NotPsdError("Laplace curvature matrix is not positive definite");
  return llt;
}

}  // namespace

double log_posterior(const DuelSet& duels, const KernelHyper& hyper, const Eigen::VectorXd& u) {
  check_inputs(duels, hyper);
  const Eigen::MatrixXd K = gram_matrix(duels.point_matrix(), hyper);
  const Eigen::LLT<Eigen::MatrixXd> llt(K);
  return likelihood_state(duels, hyper.noise_std, u).log_lik - 0.5 * u.dot(llt.solve(u));
}

Eigen::VectorXd log_posterior_gradient(const DuelSet& duels, const KernelHyper& hyper, const Eigen::VectorXd& u) {
  check_inputs(duels, hyper);
  const Eigen::MatrixXd K = gram_matrix(duels.point_matrix(), hyper);
  const Eigen::LLT<Eigen::MatrixXd> llt(K);
  return likelihood_state(duels, hyper.noise_std, u).grad - llt.solve(u);
}

PreferenceModel fit_laplace(const DuelSet& duels, const KernelHyper& hyper, const LaplaceOptions& options) {
  check_inputs(duels, hyper);
  PreferenceModel model;
  model.hyper_ = hyper;
  model.duels_ = duels;
  model.train_ = duels.point_matrix();
  const auto n = static_cast<Eigen::Index>(duels.n_points());

  // Iterate on a = K^-1 u so that K never has to be inverted.
  const Eigen::MatrixXd K = gram_matrix(model.train_, hyper);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  LikelihoodState lik = likelihood_state(duels, hyper.noise_std, u);
  double psi = lik.log_lik;
  double grad_norm = n > 0 ? (lik.grad - a).cwiseAbs().maxCoeff() : 0.0;
  int it = 0;
  while (grad_norm >= options.gradient_tolerance) {
    if (it >= options.max_iterations) {
      throw ConvergenceError("Laplace mode search did not converge", grad_norm);
    }
    ++it;
    // Newton target: (K^-1 + W)^-1 (W u + grad) = K b - K L^T B^-1 L K b.
    const Eigen::LLT<Eigen::MatrixXd> b_llt = factor_b(lik.sqrt_w, K);
    const Eigen::VectorXd b = lik.sqrt_w.transpose() * (lik.sqrt_w * u) + lik.grad;
    const Eigen::VectorXd a_target = b - lik.sqrt_w.transpose() * b_llt.solve(lik.sqrt_w * (K * b));
    const Eigen::VectorXd da = a_target - a;

    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd a_next, u_next;
    LikelihoodState lik_next;
    double psi_next = -std::numeric_limits<double>::infinity();
    for (int halving = 0; halving < 30; ++halving) {
      a_next = a + step * da;
      u_next = K * a_next;
      lik_next = likelihood_state(duels, hyper.noise_std, u_next);
      psi_next = lik_next.log_lik - 0.5 * a_next.dot(u_next);
      if (psi_next >= psi - 1e-12 * std::max(1.0, std::abs(psi))) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    const double moved = (u_next - u).cwiseAbs().maxCoeff();
    if (!accepted) {
      throw ConvergenceError("Laplace line search failed to improve the log-posterior", grad_norm);
    }
    a = a_next;
    u = u_next;
    lik = std::move(lik_next);
    psi = psi_next;
    grad_norm = (lik.grad - a).cwiseAbs().maxCoeff();
    // A full Newton step that no longer moves the mode is a fixed point even
    // when round-off in the ill-conditioned K keeps the gradient above tolerance.
    if (step == 1.0 && moved < 1e-12 * std::max(1.0, u.cwiseAbs().maxCoeff())) break;
  }

  model.mode_ = u;
  model.iterations_ = it;
  model.gradient_norm_ = grad_norm;
  model.assemble();
  return model;
}

PreferenceModel PreferenceModel::at_mode(DuelSet duels, KernelHyper hyper, Eigen::VectorXd mode) {
  check_inputs(duels, hyper);
  if (mode.size() != static_cast<Eigen::Index>(duels.n_points())) {
    throw MalformedInput("mode length must equal the number of training points");
  }
  PreferenceModel model;
  model.hyper_ = std::move(hyper);
  model.duels_ = std::move(duels);
  model.train_ = model.duels_.point_matrix();
  model.mode_ = std::move(mode);
  model.assemble();
  const Eigen::MatrixXd K = gram_matrix(model.train_, model.hyper_);
  const Eigen::LLT<Eigen::MatrixXd> llt(K);
  model.gradient_norm_ =
      model.n_points() > 0 ? (model.alpha_ - llt.solve(model.mode_)).cwiseAbs().maxCoeff() : 0.0;
  return model;
}

void PreferenceModel::assemble() {
  const LikelihoodState lik = likelihood_state(duels_, hyper_.noise_std, mode_);
  alpha_ = lik.grad;
  sqrt_w_ = lik.sqrt_w;
  const Eigen::MatrixXd K = gram_matrix(train_, hyper_);
  b_factor_ = factor_b(sqrt_w_, K);
  const Eigen::MatrixXd Lb = b_factor_.matrixL();
  const double log_det_b = 2.0 * Lb.diagonal().array().log().sum();
  // At the mode, K^-1 u = alpha.
  log_ml_ = lik.log_lik - 0.5 * mode_.dot(alpha_) - 0.5 * log_det_b;
}

Eigen::MatrixXd PreferenceModel::project(const Eigen::MatrixXd& k_cross) const {
  // Returns Lb^-1 L K* so that the explained covariance is V^T V.
  Eigen::MatrixXd V = sqrt_w_ * k_cross;
  b_factor_.matrixL().solveInPlace(V);
  return V;
}

Prediction PreferenceModel::predict(const Eigen::MatrixXd& X) const {
  if (X.cols() != dim()) throw MalformedInput("test points have the wrong dimension");
  Prediction p;
  Eigen::MatrixXd prior = kernel_matrix(X, X, hyper_);
  if (n_points() == 0) {
    p.mean = Eigen::VectorXd::Zero(X.rows());
    p.cov = prior;
  } else {
    const Eigen::MatrixXd k_cross = kernel_matrix(train_, X, hyper_);
    p.mean = k_cross.transpose() * alpha_;
    const Eigen::MatrixXd V = project(k_cross);
    p.cov = prior - V.transpose() * V;
  }
  p.cov = 0.5 * (p.cov + p.cov.transpose());
  // Round-off can push tiny variances negative; clamp those within the jitter threshold.
  for (Eigen::Index i = 0; i < p.cov.rows(); ++i) {
    if (p.cov(i, i) < 0.0 && p.cov(i, i) > -1e-10) p.cov(i, i) = 0.0;
  }
  return p;
}

Prediction PreferenceModel::predict_cost(const Eigen::MatrixXd& X) const {
  Prediction p = predict(X);
  p.mean = -p.mean;
  return p;
}

Eigen::VectorXd PreferenceModel::predict_mean(const Eigen::MatrixXd& X) const {
  if (X.cols() != dim()) throw MalformedInput("test points have the wrong dimension");
  if (n_points() == 0) return Eigen::VectorXd::Zero(X.rows());
  return kernel_matrix(train_, X, hyper_).transpose() * alpha_;
}

Marginals PreferenceModel::predict_marginals(const Eigen::MatrixXd& X, const Eigen::VectorXd& anchor) const {
  if (X.cols() != dim() || anchor.size() != dim()) throw MalformedInput("test points have the wrong dimension");
  const Eigen::MatrixXd A = anchor.transpose();
  Marginals out;
  const Eigen::VectorXd prior_cov = kernel_matrix(X, A, hyper_).col(0);
  out.var = Eigen::VectorXd::Constant(X.rows(), hyper_.signal_variance);
  out.anchor_var = hyper_.signal_variance;
  if (n_points() == 0) {
    out.mean = Eigen::VectorXd::Zero(X.rows());
    out.cov_anchor = prior_cov;
    return out;
  }
  const Eigen::MatrixXd k_cross = kernel_matrix(train_, X, hyper_);
  const Eigen::VectorXd k_anchor = kernel_matrix(train_, A, hyper_).col(0);
  out.mean = k_cross.transpose() * alpha_;
  out.anchor_mean = k_anchor.dot(alpha_);
  const Eigen::MatrixXd V = project(k_cross);
  const Eigen::VectorXd v_anchor = project(k_anchor);
  out.var -= V.colwise().squaredNorm().transpose();
  out.var = out.var.cwiseMax(0.0);
  out.anchor_var = std::max(0.0, out.anchor_var - v_anchor.squaredNorm());
  out.cov_anchor = prior_cov - V.transpose() * v_anchor;
  return out;
}

PairMarginals PreferenceModel::predict_pairs(const Eigen::MatrixXd& X1, const Eigen::MatrixXd& X2) const {
  if (X1.cols() != dim() || X2.cols() != dim() || X1.rows() != X2.rows()) {
    throw MalformedInput("paired test points have mismatched shapes");
  }
  const Eigen::Index t = X1.rows();
  PairMarginals out;
  out.var1 = Eigen::VectorXd::Constant(t, hyper_.signal_variance);
  out.var2 = out.var1;
  out.cov.resize(t);
  for (Eigen::Index i = 0; i < t; ++i) out.cov[i] = kernel_eval(X1.row(i).transpose(), X2.row(i).transpose(), hyper_);
  if (n_points() == 0) {
    out.mean1 = Eigen::VectorXd::Zero(t);
    out.mean2 = Eigen::VectorXd::Zero(t);
    return out;
  }
  const Eigen::MatrixXd k1 = kernel_matrix(train_, X1, hyper_);
  const Eigen::MatrixXd k2 = kernel_matrix(train_, X2, hyper_);
  out.mean1 = k1.transpose() * alpha_;
  out.mean2 = k2.transpose() * alpha_;
  const Eigen::MatrixXd V1 = project(k1);
  const Eigen::MatrixXd V2 = project(k2);
  out.var1 = (out.var1 - V1.colwise().squaredNorm().transpose()).cwiseMax(0.0);
  out.var2 = (out.var2 - V2.colwise().squaredNorm().transpose()).cwiseMax(0.0);
  out.cov -= V1.cwiseProduct(V2).colwise().sum().transpose();
  return out;
}

Eigen::VectorXd sample_path(const PreferenceModel& model, const Eigen::MatrixXd& X, Rng& rng) {
  // Collapse exact duplicates so the joint covariance stays non-singular.
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(X.rows()));
  std::vector<Eigen::Index> unique_rows;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Eigen::Index found = -1;
    for (std::size_t k = 0; k < unique_rows.size(); ++k) {
      if (X.row(unique_rows[k]) == X.row(i)) {
        found = static_cast<Eigen::Index>(k);
        break;
      }
    }
    if (found < 0) {
      found = static_cast<Eigen::Index>(unique_rows.size());
      unique_rows.push_back(i);
    }
    slot[static_cast<std::size_t>(i)] = found;
  }
  Eigen::MatrixXd U(static_cast<Eigen::Index>(unique_rows.size()), X.cols());
  for (std::size_t k = 0; k < unique_rows.size(); ++k) U.row(static_cast<Eigen::Index>(k)) = X.row(unique_rows[k]);

  const Prediction p = model.predict(U);
  const double scale = std::max(model.hyper().signal_variance, 1e-300);
  Eigen::LLT<Eigen::MatrixXd> llt;
  bool ok = false;
  for (double jitter = 1e-10; jitter <= 1e-4; jitter *= 10.0) {
    Eigen::MatrixXd C = p.cov;
    C.diagonal().array() += jitter * scale;
    llt.compute(C);
    if (llt.info() == Eigen::Success) {
      ok = true;
      break;
    }
  }
  if (!ok) throw NotPsdError("predictive covariance is not positive semi-definite");

  Eigen::VectorXd z(U.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = standard_normal(rng);
  const Eigen::VectorXd draw = p.mean + llt.matrixL() * z;
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = draw[slot[static_cast<std::size_t>(i)]];
  return out;
}

void to_json(nlohmann::json& j, const PreferenceModel& m) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : m.duels().points()) points.push_back(std::vector<double>(p.data(), p.data() + p.size()));
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [w, l] : m.duels().pairs()) pairs.push_back({w, l});
  j = nlohmann::json{{"hyper", m.hyper()},
                     {"points", points},
                     {"pairs", pairs},
                     {"mode", std::vector<double>(m.mode().data(), m.mode().data() + m.mode().size())}};
}

PreferenceModel model_from_json(const nlohmann::json& j) {
  const KernelHyper hyper = j.at("hyper").get<KernelHyper>();
  DuelSet duels(hyper.dim());
  for (const auto& p : j.at("points")) {
    const auto v = p.get<std::vector<double>>();
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    if (duels.add_point(x) != static_cast<int>(duels.n_points()) - 1) {
      throw MalformedInput("model snapshot contains duplicate points");
    }
  }
  for (const auto& pr : j.at("pairs")) duels.add_pair(pr.at(0).get<int>(), pr.at(1).get<int>());
  const auto mode = j.at("mode").get<std::vector<double>>();
  return PreferenceModel::at_mode(std::move(duels), hyper,
                                  Eigen::Map<const Eigen::VectorXd>(mode.data(), static_cast<Eigen::Index>(mode.size())));
}

}  // namespace pbo::gp
