#pragma once

namespace pbo::gp {

// Probability that the winner is preferred: Phi((u_w - u_l) / (sqrt(2) noise_std)).
// Throws MalformedInput when noise_std <= 0.
double pref_likelihood(double u_w, double u_l, double noise_std);

// Log-likelihood of one comparison and its derivatives with respect to u_w.
// By antisymmetry d/du_l = -grad and the Hessian block is
// [[-curv, curv], [curv, -curv]].
struct PairTerms {
  double log_lik = 0.0;
  double grad = 0.0;  // d log_lik / d u_w
  double curv = 0.0;  // -d^2 log_lik / d u_w^2, always >= 0
};

PairTerms pref_log_likelihood(double u_w, double u_l, double noise_std);

}  // namespace pbo::gp
