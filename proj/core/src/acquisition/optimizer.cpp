#include "pbo/acquisition/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <limits>
#include <numeric>

#include <gsl/gsl_qrng.h>

#include "pbo/common/errors.hpp"

namespace pbo::acq {
namespace {

struct QrngDeleter {
  void operator()(gsl_qrng* q) const { gsl_qrng_free(q); }
};

double safe_value(double v) { return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v; }

}  // namespace

Eigen::MatrixXd shifted_halton(int n, Eigen::Index dim, Rng& rng) {
  if (dim < 1 || dim > 1229) throw MalformedInput("quasi-random dimension out of range");
  Eigen::VectorXd shift(dim);
  for (Eigen::Index j = 0; j < dim; ++j) shift[j] = uniform01(rng);
  std::unique_ptr<gsl_qrng, QrngDeleter> q(gsl_qrng_alloc(gsl_qrng_halton, static_cast<unsigned>(dim)));
  Eigen::MatrixXd out(n, dim);
  std::vector<double> point(static_cast<std::size_t>(dim));
  for (int i = 0; i < n; ++i) {
    gsl_qrng_get(q.get(), point.data());
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double v = point[static_cast<std::size_t>(j)] + shift[j];
      out(i, j) = v - std::floor(v);
    }
  }
  return out;
}

BoxMaximum maximize_unit_box(const BatchObjective& f, Eigen::Index dim, Rng& rng, const OptimizerOptions& options) {
  const Eigen::MatrixXd starts = shifted_halton(std::max(1, options.candidates), dim, rng);
  const Eigen::VectorXd scores = f(starts);

  std::vector<int> order(static_cast<std::size_t>(starts.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return safe_value(scores[a]) > safe_value(scores[b]); });

  BoxMaximum best;
  best.x = starts.row(order[0]).transpose();
  best.value = safe_value(scores[order[0]]);
  best.candidate = order[0];
  const int n_polish = std::min<int>(options.polish_starts, static_cast<int>(order.size()));

  for (int s = 0; s < n_polish; ++s) {
    Eigen::VectorXd x = starts.row(order[static_cast<std::size_t>(s)]).transpose();
    double fx = safe_value(scores[order[static_cast<std::size_t>(s)]]);
    double step = options.initial_step;
    for (int it = 0; it < options.polish_iterations; ++it) {
      Eigen::MatrixXd trial(2 * dim, dim);
      for (Eigen::Index j = 0; j < dim; ++j) {
        trial.row(2 * j) = x.transpose();
        trial.row(2 * j + 1) = x.transpose();
        trial(2 * j, j) = std::min(1.0, x[j] + step);
        trial(2 * j + 1, j) = std::max(0.0, x[j] - step);
      }
      const Eigen::VectorXd values = f(trial);
      Eigen::Index arg = -1;
      double best_trial = fx;
      for (Eigen::Index r = 0; r < values.size(); ++r) {
        if (safe_value(values[r]) > best_trial) {
          best_trial = safe_value(values[r]);
          arg = r;
        }
      }
      if (arg >= 0) {
        x = trial.row(arg).transpose();
        fx = best_trial;
      } else {
        step *= options.shrink;
      }
    }
    // Strict improvement keeps the earliest-ranked start on ties.
    if (fx > best.value) {
      best.x = x;
      best.value = fx;
      best.candidate = order[static_cast<std::size_t>(s)];
    }
  }
  return best;
}

}  // namespace pbo::acq
