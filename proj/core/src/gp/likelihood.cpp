#include "pbo/gp/likelihood.hpp"

#include <cmath>
#include <numbers>

#include "pbo/common/errors.hpp"
#include "pbo/common/normal.hpp"

namespace pbo::gp {
namespace {

void check_noise(double noise_std) {
  if (!(noise_std > 0.0) || !std::isfinite(noise_std)) {
    throw MalformedInput("preference noise_std must be positive");
  }
}

}  // namespace

double pref_likelihood(double u_w, double u_l, double noise_std) {
  check_noise(noise_std);
  return normal_cdf((u_w - u_l) / (std::numbers::sqrt2 * noise_std));
}

PairTerms pref_log_likelihood(double u_w, double u_l, double noise_std) {
  check_noise(noise_std);
  const double scale = std::numbers::sqrt2 * noise_std;
  const double z = (u_w - u_l) / scale;
  const double r = inverse_mills(z);
  PairTerms t;
  t.log_lik = log_normal_cdf(z);
  t.grad = r / scale;
  t.curv = r * (z + r) / (scale * scale);
  return t;
}

}  // namespace pbo::gp
