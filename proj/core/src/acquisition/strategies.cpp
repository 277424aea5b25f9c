#include "pbo/acquisition/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pbo/common/errors.hpp"
#include "pbo/common/normal.hpp"

namespace pbo::acq {
namespace {

constexpr double kBoundaryTol = 1e-9;

bool touches_boundary(const Eigen::VectorXd& x) {
  return ((x.array() <= kBoundaryTol) || (x.array() >= 1.0 - kBoundaryTol)).any();
}

Eigen::VectorXd uniform_point(Eigen::Index dim, Rng& rng) {
  Eigen::VectorXd x(dim);
  for (Eigen::Index i = 0; i < dim; ++i) x[i] = uniform01(rng);
  return x;
}

DuelProposal finish(std::string_view strategy, Eigen::VectorXd first, Eigen::VectorXd second, double value,
                    bool first_is_incumbent, Rng& rng, const AcquisitionOptions& options) {
  DuelProposal p;
  p.strategy = std::string(strategy);
  p.first = first.cwiseMax(0.0).cwiseMin(1.0);
  p.second = second.cwiseMax(0.0).cwiseMin(1.0);
  p.value = value;
  p.first_is_incumbent = first_is_incumbent;
  p.at_boundary = touches_boundary(p.second);
  if (options.reflect_boundary && p.at_boundary) {
    for (Eigen::Index i = 0; i < p.second.size(); ++i) {
      const double kick = std::abs(options.reflect_scale * standard_normal(rng));
      if (p.second[i] <= kBoundaryTol) p.second[i] = std::min(1.0, kick);
      else if (p.second[i] >= 1.0 - kBoundaryTol) p.second[i] = std::max(0.0, 1.0 - kick);
    }
  }
  p.degenerate = (p.first - p.second).cwiseAbs().maxCoeff() <= gp::DuelSet::kMergeTolerance;
  return p;
}

// Maximizes a per-point score of the challenger with the incumbent fixed first.
template <class Score>
DuelProposal challenge_incumbent(std::string_view strategy, const gp::PreferenceModel& model, Rng& rng,
                                 const AcquisitionOptions& options, Score score) {
  const Eigen::VectorXd inc = incumbent(model);
  const BoxMaximum best = maximize_unit_box([&](const Eigen::MatrixXd& X) { return score(inc, X); }, model.dim(),
                                            rng, options.optimizer);
  return finish(strategy, inc, best.x, best.value, true, rng, options);
}

}  // namespace

const std::vector<std::string>& dueling_strategies() {
  static const std::vector<std::string> ids{std::string(kEubo),  std::string(kDuelUcb), std::string(kDuelThompson),
                                            std::string(kEiig),  std::string(kHbEi),    std::string(kHbUcb),
                                            std::string(kMuc),   std::string(kRandom)};
  return ids;
}

bool is_dueling_strategy(std::string_view id) {
  const auto& ids = dueling_strategies();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

double scalar_ei(double mean, double std, double best) {
  const double gap = mean - best;
  if (std <= 0.0) return std::max(0.0, gap);
  const double z = gap / std;
  return gap * normal_cdf(z) + std * normal_pdf(z);
}

double scalar_ucb(double mean, double std, double beta) { return mean + std::sqrt(beta) * std; }

Eigen::VectorXd incumbent(const gp::PreferenceModel& model) {
  if (model.n_points() == 0) throw MalformedInput("incumbent requires at least one evaluated point");
  const Eigen::VectorXd means = model.predict_mean(model.duels().point_matrix());
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < means.size(); ++i) {
    if (means[i] > means[best]) best = i;
  }
  return model.duels().points()[static_cast<std::size_t>(best)];
}

double eubo_from_moments(double mean1, double mean2, double var1, double var2, double cov) {
  const double s2 = var1 + var2 - 2.0 * cov;
  if (s2 < -1e-10) throw NotPsdError("negative variance of the utility difference");
  const double s = std::sqrt(std::max(0.0, s2));
  if (s < 1e-12) return std::max(mean1, mean2);
  const double delta = (mean1 - mean2) / s;
  return mean1 * normal_cdf(delta) + mean2 * normal_cdf(-delta) + s * normal_pdf(delta);
}

double eubo(const gp::PreferenceModel& model, const Eigen::VectorXd& x1, const Eigen::VectorXd& x2) {
  const gp::PairMarginals m = model.predict_pairs(x1.transpose(), x2.transpose());
  return eubo_from_moments(m.mean1[0], m.mean2[0], m.var1[0], m.var2[0], m.cov[0]);
}

double eiig_score(double mean, double mean_incumbent, double diff_var, double noise_std, double kappa) {
  const double scale = std::sqrt(2.0 * noise_std * noise_std + std::max(0.0, diff_var));
  const double z = (mean - mean_incumbent) / scale;
  const double log_p = log_normal_cdf(z);
  const double p = normal_cdf(z);
  const double q = normal_cdf(-z);
  const double entropy = (p > 0.0 ? -p * std::log(p) : 0.0) + (q > 0.0 ? -q * std::log(q) : 0.0);
  return log_p + kappa * entropy;
}

DuelProposal propose_eubo(const gp::PreferenceModel& model, Rng& rng, const AcquisitionOptions& options) {
  const Eigen::Index d = model.dim();
  auto score = [&](const Eigen::MatrixXd& XX) {
    const gp::PairMarginals m = model.predict_pairs(XX.leftCols(d), XX.rightCols(d));
    Eigen::VectorXd v(XX.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      v[i] = eubo_from_moments(m.mean1[i], m.mean2[i], m.var1[i], m.var2[i], m.cov[i]);
    }
    return v;
  };
  const BoxMaximum best = maximize_unit_box(score, 2 * d, rng, options.optimizer);
  return finish(kEubo, best.x.head(d), best.x.tail(d), best.value, false, rng, options);
}

DuelProposal propose_duel_ucb(const gp::PreferenceModel& model, Rng& rng, const AcquisitionOptions& options) {
  return challenge_incumbent(kDuelUcb, model, rng, options, [&](const Eigen::VectorXd& inc, const Eigen::MatrixXd& X) {
    const gp::Marginals m = model.predict_marginals(X, inc);
    Eigen::VectorXd v(X.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = scalar_ucb(m.mean[i], std::sqrt(m.var[i]), options.beta);
    return v;
  });
}

DuelProposal propose_duel_thompson(const gp::PreferenceModel& model, Rng& rng, const AcquisitionOptions& options,
                                   const Eigen::MatrixXd* grid, Eigen::Index* grid_index) {
  const Eigen::VectorXd inc = incumbent(model);
  const Eigen::MatrixXd candidates =
      grid != nullptr ? *grid : shifted_halton(std::max(1, options.thompson_grid), model.dim(), rng);
  const Eigen::VectorXd draw = gp::sample_path(model, candidates, rng);
  Eigen::Index arg = 0;
  for (Eigen::Index i = 1; i < draw.size(); ++i) {
    if (draw[i] > draw[arg]) arg = i;
  }
  const bool flat = draw.maxCoeff() - draw.minCoeff() <= 0.0;
  if (flat) arg = static_cast<Eigen::Index>(std::min<double>(uniform01(rng) * draw.size(), draw.size() - 1));
  if (grid_index != nullptr) *grid_index = arg;
  DuelProposal p = finish(kDuelThompson, inc, candidates.row(arg).transpose(), draw[arg], true, rng, options);
  p.fallback = flat;
  return p;
}

DuelProposal propose_eiig(const gp::PreferenceModel& model, Rng& rng, const AcquisitionOptions& options) {
  const double noise = model.hyper().noise_std;
  return challenge_incumbent(kEiig, model, rng, options, [&](const Eigen::VectorXd& inc, const Eigen::MatrixXd& X) {
    const gp::Marginals m = model.predict_marginals(X, inc);
    Eigen::VectorXd v(X.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double diff_var = m.var[i] + m.anchor_var - 2.0 * m.cov_anchor[i];
      v[i] = eiig_score(m.mean[i], m.anchor_mean, diff_var, noise, options.kappa);
    }
    return v;
  });
}

void conditioned_predictive(const gp::PreferenceModel& model, const Hallucination& h, const Eigen::MatrixXd& X,
                            Eigen::VectorXd& mean, Eigen::VectorXd& var) {
  const gp::Marginals m = model.predict_marginals(X, h.incumbent);
  mean = m.mean;
  var = m.var;
  if (m.anchor_var <= 1e-14 * model.hyper().signal_variance) return;
  const Eigen::VectorXd gain = m.cov_anchor / m.anchor_var;
  mean += gain * (h.value - m.anchor_mean);
  var -= gain.cwiseProduct(m.cov_anchor);
  if ((var.array() < -1e-10 * model.hyper().signal_variance).any()) {
    throw NotPsdError("hallucination conditioning produced a negative variance");
  }
  var = var.cwiseMax(0.0);
}

DuelProposal propose_hb(const gp::PreferenceModel& model, ScalarAcquisition base, Rng& rng,
                        const AcquisitionOptions& options) {
  Hallucination h;
  h.incumbent = incumbent(model);
  const gp::Prediction at_inc = model.predict(h.incumbent.transpose());
  h.mean = at_inc.mean[0];
  h.var = at_inc.cov(0, 0);
  h.value = gp::sample_path(model, h.incumbent.transpose(), rng)[0];
  const std::string_view id = base == ScalarAcquisition::Ei ? kHbEi : kHbUcb;
  return challenge_incumbent(id, model, rng, options, [&](const Eigen::VectorXd&, const Eigen::MatrixXd& X) {
    Eigen::VectorXd mean, var;
    conditioned_predictive(model, h, X, mean, var);
    Eigen::VectorXd v(X.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double sd = std::sqrt(var[i]);
      v[i] = base == ScalarAcquisition::Ei ? scalar_ei(mean[i], sd, h.value) : scalar_ucb(mean[i], sd, options.beta);
    }
    return v;
  });
}

DuelProposal propose_muc(const gp::PreferenceModel& model, Rng& rng, const AcquisitionOptions& options) {
  return challenge_incumbent(kMuc, model, rng, options, [&](const Eigen::VectorXd& inc, const Eigen::MatrixXd& X) {
    return model.predict_marginals(X, inc).var;
  });
}

DuelProposal propose_random(Eigen::Index dim, Rng& rng) {
  Eigen::VectorXd a = uniform_point(dim, rng);
  Eigen::VectorXd b = uniform_point(dim, rng);
  return finish(kRandom, std::move(a), std::move(b), 0.0, false, rng, AcquisitionOptions{});
}

DuelProposal propose(std::string_view strategy, const gp::PreferenceModel& model, Rng& rng,
                     const AcquisitionOptions& options) {
  if (strategy == kEubo) return propose_eubo(model, rng, options);
  if (strategy == kDuelUcb) return propose_duel_ucb(model, rng, options);
  if (strategy == kDuelThompson) return propose_duel_thompson(model, rng, options);
  if (strategy == kEiig) return propose_eiig(model, rng, options);
  if (strategy == kHbEi) return propose_hb(model, ScalarAcquisition::Ei, rng, options);
  if (strategy == kHbUcb) return propose_hb(model, ScalarAcquisition::Ucb, rng, options);
  if (strategy == kMuc) return propose_muc(model, rng, options);
  if (strategy == kRandom) return propose_random(model.dim(), rng);
  throw MalformedInput("unknown dueling strategy '" + std::string(strategy) + "'");
}

Eigen::VectorXd propose_scalar(const gp::GpRegression& model, ScalarAcquisition kind, double best, Rng& rng,
                               const AcquisitionOptions& options) {
  auto score = [&](const Eigen::MatrixXd& X) {
    Eigen::VectorXd mean, var;
    model.predict(X, mean, var);
    Eigen::VectorXd v(X.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double sd = std::sqrt(var[i]);
      v[i] = kind == ScalarAcquisition::Ei ? scalar_ei(mean[i], sd, best) : scalar_ucb(mean[i], sd, options.beta);
    }
    return v;
  };
  return maximize_unit_box(score, model.hyper().dim(), rng, options.optimizer).x;
}

}  // namespace pbo::acq
