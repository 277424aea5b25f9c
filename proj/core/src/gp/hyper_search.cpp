#include "pbo/gp/hyper_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pbo/common/errors.hpp"
#include "pbo/common/simplex.hpp"
#include "pbo/gp/preference_model.hpp"

namespace pbo::gp {
namespace {

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(std::log(lo) + uniform01(rng) * (std::log(hi) - std::log(lo)));
}

}  // namespace

KernelHyper clamp_to_bounds(KernelHyper h, const HyperBounds& b) {
  h.lengthscales = h.lengthscales.cwiseMax(b.lengthscale_min).cwiseMin(b.lengthscale_max);
  h.signal_variance = std::clamp(h.signal_variance, b.signal_variance_min, b.signal_variance_max);
  h.noise_std = std::clamp(h.noise_std, b.noise_min, b.noise_max);
  return h;
}

HyperFitResult optimize_hyperparameters(const DuelSet& duels, const KernelHyper& initial, Rng& rng,
                                        const HyperSearchOptions& options) {
  if (duels.n_pairs() < 2) throw MalformedInput("hyperparameter search needs at least two duels");
  initial.validate();
  const Eigen::Index d = initial.dim();
  const HyperBounds& b = options.bounds;
  const bool fit_sf = options.fit_signal_variance;
  const Eigen::Index n_free = d + 1 + (fit_sf ? 1 : 0);

  auto decode = [&](const Eigen::VectorXd& theta) {
    KernelHyper h = initial;
    h.lengthscales = theta.head(d).array().exp();
    h.noise_std = std::exp(theta[d]);
    if (fit_sf) h.signal_variance = std::exp(theta[d + 1]);
    return clamp_to_bounds(h, b);
  };
  auto encode = [&](const KernelHyper& h) {
    Eigen::VectorXd theta(n_free);
    theta.head(d) = h.lengthscales.array().log();
    theta[d] = std::log(h.noise_std);
    if (fit_sf) theta[d + 1] = std::log(h.signal_variance);
    return theta;
  };
  auto objective = [&](const Eigen::VectorXd& theta) {
    try {
      return -fit_laplace(duels, decode(theta)).log_marginal_likelihood();
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  HyperFitResult best;
  best.log_marginal_likelihood = -std::numeric_limits<double>::infinity();
  int evaluations = 0;
  for (int start = 0; start < std::max(1, options.starts); ++start) {
    KernelHyper h0 = clamp_to_bounds(initial, b);
    if (start > 0) {
      for (Eigen::Index i = 0; i < d; ++i) h0.lengthscales[i] = log_uniform(rng, b.lengthscale_min, b.lengthscale_max);
      h0.noise_std = log_uniform(rng, b.noise_min, b.noise_max);
      if (fit_sf) h0.signal_variance = log_uniform(rng, b.signal_variance_min, b.signal_variance_max);
    }
    const SimplexResult r = minimize_simplex(objective, encode(h0), 0.5, options.max_evaluations_per_start);
    evaluations += r.evaluations;
    const KernelHyper h = decode(r.x);
    const double value = objective(encode(h));
    ++evaluations;
    if (std::isfinite(value) && -value > best.log_marginal_likelihood) {
      best.hyper = h;
      best.log_marginal_likelihood = -value;
    }
  }
  best.evaluations = evaluations;
  if (!std::isfinite(best.log_marginal_likelihood)) {
    best.hyper = KernelHyper::defaults(d);
    best.used_defaults = true;
  }
  return best;
}

}  // namespace pbo::gp
