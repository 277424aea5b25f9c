#pragma once

#include "pbo/common/random.hpp"
#include "pbo/gp/duel_set.hpp"
#include "pbo/gp/kernel.hpp"

namespace pbo::gp {

struct HyperBounds {
  double lengthscale_min = 0.05;
  double lengthscale_max = 5.0;
  double signal_variance_min = 0.1;
  double signal_variance_max = 10.0;
  double noise_min = 0.01;
  double noise_max = 1.0;
};

struct HyperSearchOptions {
  int starts = 3;
  int max_evaluations_per_start = 120;
  // The probit likelihood only sees the ratio of utility scale to noise, so
  // by default the signal variance stays at its starting value.
  bool fit_signal_variance = false;
  HyperBounds bounds;
};

struct HyperFitResult {
  KernelHyper hyper;
  double log_marginal_likelihood = 0.0;
  int evaluations = 0;
  bool used_defaults = false;  // every start failed; `hyper` is KernelHyper::defaults
};

// Maximizes the Laplace log marginal likelihood over log-hyperparameters.
// Start 0 is `initial`; the others are drawn log-uniformly inside the bounds.
// Requires at least two duels (MalformedInput otherwise).
HyperFitResult optimize_hyperparameters(const DuelSet& duels, const KernelHyper& initial, Rng& rng,
                                        const HyperSearchOptions& options = {});

// Projects every hyperparameter into its bounds.
KernelHyper clamp_to_bounds(KernelHyper hyper, const HyperBounds& bounds);

}  // namespace pbo::gp
