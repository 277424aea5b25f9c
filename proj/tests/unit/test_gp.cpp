#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "../support/quadrature.hpp"
#include "pbo/common/errors.hpp"
#include "pbo/common/normal.hpp"
#include "pbo/gp/duel_set.hpp"
#include "pbo/gp/hyper_search.hpp"
#include "pbo/gp/kernel.hpp"
#include "pbo/gp/likelihood.hpp"
#include "pbo/gp/preference_model.hpp"
#include "pbo/gp/regression.hpp"

using namespace pbo;
using namespace pbo::gp;

namespace {

Eigen::VectorXd v1(double x) { return Eigen::VectorXd::Constant(1, x); }

KernelHyper hyper1d(double ls, double noise, double sf2 = 1.0) {
  KernelHyper h = KernelHyper::defaults(1, ls);
  h.noise_std = noise;
  h.signal_variance = sf2;
  return h;
}

Eigen::MatrixXd rows1d(std::initializer_list<double> xs) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) X(i++, 0) = x;
  return X;
}

// Random duels on [0,1] decided by a deterministic cost.
template <class Cost>
DuelSet duels_from_cost(Cost cost, int n, std::uint64_t seed) {
  Rng rng(seed);
  DuelSet d(1);
  for (int i = 0; i < n; ++i) {
    const double a = uniform01(rng), b = uniform01(rng);
    if (std::abs(a - b) < 1e-3) continue;
    if (cost(a) <= cost(b)) d.add_duel(v1(a), v1(b));
    else d.add_duel(v1(b), v1(a));
  }
  return d;
}

}  // namespace

TEST(Kernel, ZeroLagAndSymmetry) {
  KernelHyper h = KernelHyper::defaults(4, 0.3);
  h.signal_variance = 2.5;
  h.lengthscales << 0.2, 0.5, 1.0, 3.0;
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd x(4), y(4);
    for (int i = 0; i < 4; ++i) {
      x[i] = uniform01(rng);
      y[i] = uniform01(rng);
    }
    EXPECT_DOUBLE_EQ(kernel_eval(x, x, h), 2.5);
    EXPECT_DOUBLE_EQ(kernel_eval(x, y, h), kernel_eval(y, x, h));
    EXPECT_LE(kernel_eval(x, y, h), 2.5);
  }
}

TEST(Kernel, UnitLagValue) {
  // (1 + sqrt5 + 5/3) exp(-sqrt5), evaluated independently.
  EXPECT_NEAR(kernel_eval(v1(0.0), v1(1.0), hyper1d(1.0, 0.1)), 0.5239941088318203, 1e-14);
}

TEST(Kernel, RejectsNonPositiveHyper) {
  EXPECT_THROW(kernel_eval(v1(0), v1(1), hyper1d(0.0, 0.1)), MalformedInput);
  EXPECT_THROW(kernel_eval(v1(0), v1(1), hyper1d(1.0, 0.1, -1.0)), MalformedInput);
  EXPECT_THROW(kernel_eval(v1(0), v1(1), hyper1d(1.0, 0.0)), MalformedInput);
}

TEST(Likelihood, KnownValues) {
  EXPECT_DOUBLE_EQ(pref_likelihood(0.3, 0.3, 0.1), 0.5);
  EXPECT_NEAR(pref_likelihood(std::numbers::sqrt2 * 0.2, 0.0, 0.2), 0.8413447460685429, 1e-12);
  EXPECT_NEAR(pref_likelihood(50.0, 0.0, 0.1), 1.0, 1e-15);
  EXPECT_GT(pref_likelihood(-1.0, 0.0, 0.1), 0.0);
  // Far in the tail the probability underflows but its log stays finite.
  EXPECT_TRUE(std::isfinite(pref_log_likelihood(-50.0, 0.0, 0.1).log_lik));
  EXPECT_NEAR(pref_log_likelihood(-50.0, 0.0, 0.1).grad, 353.5533905932738 / (std::numbers::sqrt2 * 0.1), 1.0);
  EXPECT_THROW(pref_likelihood(1.0, 0.0, 0.0), MalformedInput);
}

TEST(Likelihood, TranslationInvariance) {
  for (double shift : {-7.0, 0.1, 3.3}) {
    EXPECT_NEAR(pref_likelihood(0.4 + shift, -0.2 + shift, 0.3), pref_likelihood(0.4, -0.2, 0.3), 1e-14);
  }
}

TEST(Likelihood, DerivativesMatchFiniteDifferences) {
  for (double diff : {-40.0, -3.0, -0.5, 0.0, 0.7, 4.0}) {
    const double s = 0.2, h = 1e-5;
    const PairTerms t = pref_log_likelihood(diff, 0.0, s);
    const double up = pref_log_likelihood(diff + h, 0.0, s).log_lik;
    const double dn = pref_log_likelihood(diff - h, 0.0, s).log_lik;
    EXPECT_NEAR(t.grad, (up - dn) / (2 * h), 1e-5 * std::max(1.0, std::abs(t.grad))) << diff;
    const double gup = pref_log_likelihood(diff + h, 0.0, s).grad;
    const double gdn = pref_log_likelihood(diff - h, 0.0, s).grad;
    EXPECT_NEAR(t.curv, -(gup - gdn) / (2 * h), 1e-4 * std::max(1.0, t.curv)) << diff;
    EXPECT_GE(t.curv, 0.0);
  }
}

TEST(DuelSet, DeduplicatesAndValidates) {
  DuelSet d(2);
  Eigen::Vector2d a(0.1, 0.2), b(0.5, 0.5);
  d.add_duel(a, b);
  d.add_duel(b, a + Eigen::Vector2d::Constant(1e-9));
  EXPECT_EQ(d.n_points(), 2u);
  EXPECT_EQ(d.n_pairs(), 2u);
  EXPECT_THROW(d.add_duel(a, a), MalformedInput);
  EXPECT_THROW(d.add_pair(0, 5), MalformedInput);
  EXPECT_THROW(d.add_duel(Eigen::Vector2d(1.5, 0.0), a), MalformedInput);
}

TEST(Laplace, EmptyDuelsGivePrior) {
  const KernelHyper h = hyper1d(0.4, 0.1, 1.7);
  const PreferenceModel m = fit_laplace(DuelSet(1), h);
  const Prediction p = m.predict(rows1d({0.0, 0.3, 0.9}));
  EXPECT_TRUE(p.mean.isZero());
  for (int i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(p.cov(i, i), 1.7);
}

TEST(Laplace, SingleDuelOrdersThePair) {
  DuelSet d(1);
  d.add_duel(v1(0.8), v1(0.2));
  const PreferenceModel m = fit_laplace(d, hyper1d(0.5, 0.1));
  EXPECT_GT(m.mode()[0], m.mode()[1]);
  const Eigen::VectorXd mean = m.predict_mean(rows1d({0.8, 0.2}));
  EXPECT_GT(mean[0], mean[1]);
  EXPECT_LT(m.predict_cost(rows1d({0.8})).mean[0], m.predict_cost(rows1d({0.2})).mean[0]);
}

TEST(Laplace, ModeMatchesBruteForceMaximum) {
  // Exact log-posterior maximized on a fine grid, then refined by coordinate bisection.
  const double sigma = 0.1, ls = 0.5;
  DuelSet d(1);
  d.add_duel(v1(0.25), v1(0.75));
  const PreferenceModel m = fit_laplace(d, hyper1d(ls, sigma));
  Eigen::Matrix2d K;
  K << 1.0, oracle::matern52_1d(0.25, 0.75, ls, 1.0), oracle::matern52_1d(0.25, 0.75, ls, 1.0), 1.0;
  K.diagonal().array() += 1e-8;
  const Eigen::Matrix2d Ki = K.inverse();
  auto logpost = [&](double a, double b) {
    const Eigen::Vector2d u(a, b);
    return std::log(normal_cdf((a - b) / (std::numbers::sqrt2 * sigma))) - 0.5 * u.dot(Ki * u);
  };
  double best_a = 0, best_b = 0, best = -1e300;
  for (double a = -1.0; a <= 1.0; a += 0.002) {
    for (double b = -1.0; b <= 1.0; b += 0.002) {
      if (const double v = logpost(a, b); v > best) {
        best = v;
        best_a = a;
        best_b = b;
      }
    }
  }
  EXPECT_NEAR(m.mode()[0], best_a, 0.003);
  EXPECT_NEAR(m.mode()[1], best_b, 0.003);
  EXPECT_LE(m.gradient_norm(), 1e-6);
}

TEST(Laplace, NearbyPairMatchesQuadratureMean) {
  // For strongly correlated latents the posterior is close to Gaussian and the
  // mode tracks the exact mean; the skew grows with separation (see acceptance).
  const double sigma = 0.1, ls = 0.5, xa = 0.45, xb = 0.5;
  DuelSet d(1);
  d.add_duel(v1(xa), v1(xb));
  const PreferenceModel m = fit_laplace(d, hyper1d(ls, sigma));
  Eigen::Matrix2d K;
  const double k = oracle::matern52_1d(xa, xb, ls, 1.0);
  K << 1.0 + 1e-8, k, k, 1.0 + 1e-8;
  const auto q = oracle::probit_posterior_quadrature(K, {{0, 1}}, sigma, 801);
  EXPECT_NEAR(m.mode()[0], q.mean[0], 0.02);
  EXPECT_NEAR(m.mode()[1], q.mean[1], 0.02);
}

TEST(Laplace, GradientMatchesFiniteDifferences) {
  KernelHyper h = KernelHyper::defaults(2, 0.4);
  h.noise_std = 0.3;
  Rng rng(17);
  DuelSet d(2);
  for (int i = 0; i < 8; ++i) {
    Eigen::Vector2d a(uniform01(rng), uniform01(rng)), b(uniform01(rng), uniform01(rng));
    d.add_duel(a, b);
  }
  const auto n = static_cast<Eigen::Index>(d.n_points());
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd u(n);
    for (Eigen::Index i = 0; i < n; ++i) u[i] = 2.0 * standard_normal(rng) * 0.3;
    const Eigen::VectorXd g = log_posterior_gradient(d, h, u);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double step = 1e-5;
      Eigen::VectorXd up = u, dn = u;
      up[i] += step;
      dn[i] -= step;
      const double fd = (log_posterior(d, h, up) - log_posterior(d, h, dn)) / (2 * step);
      EXPECT_NEAR(g[i], fd, 1e-5 * std::max(1.0, std::abs(fd))) << "coordinate " << i;
    }
  }
}

TEST(Laplace, IterationCapRaisesWithGradientNorm) {
  DuelSet d = duels_from_cost([](double x) { return std::sin(12 * x); }, 30, 3);
  LaplaceOptions opts;
  opts.max_iterations = 1;
  try {
    fit_laplace(d, hyper1d(0.2, 0.01), opts);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.last_gradient_norm(), 1e-6);
  }
}

TEST(Laplace, MonotoneChainGivesDecreasingMeans) {
  DuelSet d(1);
  const double xs[] = {0.1, 0.3, 0.5, 0.7, 0.9};
  for (int i = 0; i + 1 < 5; ++i) d.add_duel(v1(xs[i]), v1(xs[i + 1]));
  const PreferenceModel m = fit_laplace(d, hyper1d(0.3, 0.1));
  const Eigen::VectorXd mean = m.predict_mean(rows1d({0.1, 0.3, 0.5, 0.7, 0.9}));
  for (int i = 0; i + 1 < 5; ++i) EXPECT_GT(mean[i], mean[i + 1]);
}

namespace {

struct DuplicatePair {
  PreferenceModel once;
  PreferenceModel twice;
};

DuplicatePair fit_with_duplicates(double noise_std) {
  KernelHyper h = KernelHyper::defaults(2, 0.5);
  h.noise_std = noise_std;
  Rng rng(4);
  DuelSet once(2), twice(2);
  for (int i = 0; i < 6; ++i) {
    Eigen::Vector2d a(uniform01(rng), uniform01(rng)), b(uniform01(rng), uniform01(rng));
    if (a.sum() < b.sum()) std::swap(a, b);
    once.add_duel(a, b);
    twice.add_duel(a, b);
    twice.add_duel(a, b);
  }
  return {fit_laplace(once, h), fit_laplace(twice, h)};
}

}  // namespace

TEST(Laplace, DuplicatedDuelsKeepArgmax) {
  for (double noise : {0.05, 0.1, 1.0}) {
    const auto [m1, m2] = fit_with_duplicates(noise);
    Eigen::Index i1, i2;
    m1.mode().maxCoeff(&i1);
    m2.mode().maxCoeff(&i2);
    EXPECT_EQ(i1, i2) << noise;
  }
}

TEST(Laplace, DuplicatedDuelsShrinkVarianceWhenCurvatureGrows) {
  // With noise comparable to the utility scale the probit curvature barely
  // changes as the mode spreads, so doubling the data adds precision.
  const auto [m1, m2] = fit_with_duplicates(1.0);
  const Eigen::MatrixXd X = m1.duels().point_matrix();
  const Prediction p1 = m1.predict(X), p2 = m2.predict(X);
  for (Eigen::Index i = 0; i < X.rows(); ++i) EXPECT_LE(p2.cov(i, i), p1.cov(i, i) + 1e-12);
}

TEST(Laplace, DuplicatedDuelsCanWidenVarianceAtLowNoise) {
  // Curvature r(z)(z + r(z)) decays for large z: a duplicated duel pushes the
  // mode further apart and the Gaussian approximation loses precision.
  const auto [m1, m2] = fit_with_duplicates(0.1);
  const Eigen::MatrixXd X = m1.duels().point_matrix();
  const Prediction p1 = m1.predict(X), p2 = m2.predict(X);
  EXPECT_GT((p2.cov.diagonal() - p1.cov.diagonal()).maxCoeff(), 0.0);
}

TEST(Predict, CovarianceBoundedAndPsd) {
  KernelHyper h = KernelHyper::defaults(3, 0.3);
  Rng rng(8);
  DuelSet d(3);
  for (int i = 0; i < 12; ++i) {
    Eigen::Vector3d a(uniform01(rng), uniform01(rng), uniform01(rng));
    Eigen::Vector3d b(uniform01(rng), uniform01(rng), uniform01(rng));
    if (a.norm() > b.norm()) d.add_duel(a, b);
    else d.add_duel(b, a);
  }
  const PreferenceModel m = fit_laplace(d, h);
  Eigen::MatrixXd X(40, 3);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = uniform01(rng);
  const Prediction p = m.predict(X);
  EXPECT_TRUE(p.cov.isApprox(p.cov.transpose()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    EXPECT_LE(p.cov(i, i), h.signal_variance * (1 + kJitter));
    EXPECT_GE(p.cov(i, i), 0.0);
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p.cov);
  EXPECT_GT(eig.eigenvalues().minCoeff(), -1e-10);
  const Marginals mg = m.predict_marginals(X, X.row(3).transpose());
  EXPECT_TRUE(mg.mean.isApprox(p.mean, 1e-12));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    EXPECT_NEAR(mg.var[i], p.cov(i, i), 1e-12);
    EXPECT_NEAR(mg.cov_anchor[i], p.cov(i, 3), 1e-12);
  }
  EXPECT_THROW(m.predict(Eigen::MatrixXd::Zero(2, 2)), MalformedInput);
}

TEST(SamplePath, DuplicatesShareValuesAndDeterministic) {
  DuelSet d(1);
  d.add_duel(v1(0.2), v1(0.6));
  const PreferenceModel m = fit_laplace(d, hyper1d(0.3, 0.1));
  const Eigen::MatrixXd X = rows1d({0.1, 0.5, 0.1, 0.9, 0.5});
  Rng r1(3), r2(3);
  const Eigen::VectorXd s1 = sample_path(m, X, r1);
  const Eigen::VectorXd s2 = sample_path(m, X, r2);
  EXPECT_EQ(s1, s2);
  EXPECT_EQ(s1[0], s1[2]);
  EXPECT_EQ(s1[1], s1[4]);
}

TEST(SamplePath, MonteCarloMomentsMatchPredictive) {
  DuelSet d(1);
  d.add_duel(v1(0.2), v1(0.7));
  d.add_duel(v1(0.45), v1(0.7));
  const PreferenceModel m = fit_laplace(d, hyper1d(0.3, 0.1));
  const Eigen::MatrixXd X = rows1d({0.0, 0.3, 0.55, 0.8, 1.0});
  const Prediction p = m.predict(X);
  Rng rng(21);
  const int n = 10000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(5);
  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd s = sample_path(m, X, rng);
    sum += s;
    outer += s * s.transpose();
  }
  const Eigen::VectorXd mean = sum / n;
  const Eigen::MatrixXd cov = (outer - n * mean * mean.transpose()) / (n - 1);
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(mean[i], p.mean[i], 3.0 * std::sqrt(p.cov(i, i) / n)) << i;
  }
  EXPECT_LT((cov - p.cov).norm() / p.cov.norm(), 0.05);
}

TEST(HyperSearch, SmoothCostYieldsLongerLengthscale) {
  const DuelSet smooth = duels_from_cost([](double x) { return (x - 0.3) * (x - 0.3); }, 40, 1);
  const DuelSet wiggly = duels_from_cost([](double x) { return std::sin(25.0 * x); }, 40, 1);
  Rng r1(9), r2(9);
  const HyperFitResult a = optimize_hyperparameters(smooth, hyper1d(0.5, 0.1), r1);
  const HyperFitResult b = optimize_hyperparameters(wiggly, hyper1d(0.5, 0.1), r2);
  EXPECT_GT(a.hyper.lengthscales[0], b.hyper.lengthscales[0]);
}

TEST(HyperSearch, RespectsBoundsAndIsDeterministic) {
  const DuelSet d = duels_from_cost([](double x) { return std::cos(7.0 * x); }, 25, 2);
  HyperSearchOptions opts;
  opts.fit_signal_variance = true;
  Rng r1(4), r2(4);
  const HyperFitResult a = optimize_hyperparameters(d, hyper1d(0.5, 0.1), r1, opts);
  const HyperFitResult b = optimize_hyperparameters(d, hyper1d(0.5, 0.1), r2, opts);
  EXPECT_EQ(a.hyper, b.hyper);
  EXPECT_EQ(a.log_marginal_likelihood, b.log_marginal_likelihood);
  EXPECT_FALSE(a.used_defaults);
  const HyperBounds& bd = opts.bounds;
  EXPECT_GE(a.hyper.lengthscales[0], bd.lengthscale_min);
  EXPECT_LE(a.hyper.lengthscales[0], bd.lengthscale_max);
  EXPECT_GE(a.hyper.noise_std, bd.noise_min);
  EXPECT_LE(a.hyper.noise_std, bd.noise_max);
  EXPECT_GE(a.hyper.signal_variance, bd.signal_variance_min);
  EXPECT_LE(a.hyper.signal_variance, bd.signal_variance_max);
  // Never worse than the starting point.
  EXPECT_GE(a.log_marginal_likelihood, fit_laplace(d, hyper1d(0.5, 0.1)).log_marginal_likelihood() - 1e-9);
}

TEST(HyperSearch, NeedsTwoDuels) {
  DuelSet d(1);
  d.add_duel(v1(0.1), v1(0.2));
  Rng rng(1);
  EXPECT_THROW(optimize_hyperparameters(d, hyper1d(0.5, 0.1), rng), MalformedInput);
}

TEST(Snapshot, ReloadReproducesPredictions) {
  const DuelSet d = duels_from_cost([](double x) { return std::abs(x - 0.6); }, 12, 6);
  const PreferenceModel m = fit_laplace(d, hyper1d(0.4, 0.1));
  const nlohmann::json j = m;
  EXPECT_TRUE(j.contains("hyper") && j.contains("points") && j.contains("pairs") && j.contains("mode"));
  const PreferenceModel back = model_from_json(nlohmann::json::parse(j.dump()));
  const Eigen::MatrixXd X = rows1d({0.0, 0.33, 0.61, 0.99});
  const Prediction p1 = m.predict(X), p2 = back.predict(X);
  EXPECT_TRUE(p1.mean.isApprox(p2.mean, 1e-12));
  EXPECT_TRUE(p1.cov.isApprox(p2.cov, 1e-12));
  EXPECT_NEAR(back.log_marginal_likelihood(), m.log_marginal_likelihood(), 1e-9);
}

TEST(Regression, MatchesDenseFormulas) {
  const Eigen::MatrixXd X = rows1d({0.1, 0.4, 0.5, 0.9});
  const Eigen::Vector4d y(1.0, -0.5, 0.2, 0.8);
  const KernelHyper h = hyper1d(0.3, 0.05);
  const GpRegression g = GpRegression::fit(X, y, h);
  Eigen::Matrix4d K;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) K(i, j) = oracle::matern52_1d(X(i, 0), X(j, 0), 0.3, 1.0);
  K.diagonal().array() += 1e-8 + 0.05 * 0.05;
  const double expected_lml = -0.5 * y.dot(K.inverse() * y) - 0.5 * std::log(K.determinant()) -
                              2.0 * std::log(2.0 * std::numbers::pi);
  EXPECT_NEAR(g.log_marginal_likelihood(), expected_lml, 1e-9);
  Eigen::VectorXd mean, var;
  g.predict(rows1d({0.7}), mean, var);
  Eigen::Vector4d k;
  for (int i = 0; i < 4; ++i) k[i] = oracle::matern52_1d(X(i, 0), 0.7, 0.3, 1.0);
  EXPECT_NEAR(mean[0], k.dot(K.inverse() * y), 1e-9);
  EXPECT_NEAR(var[0], 1.0 - k.dot(K.inverse() * k), 1e-9);
}

TEST(Regression, HyperFitPrefersLongLengthscaleForLinearData) {
  Eigen::MatrixXd X(15, 1);
  Eigen::VectorXd y(15);
  for (int i = 0; i < 15; ++i) {
    X(i, 0) = i / 14.0;
    y[i] = X(i, 0) - 0.5;
  }
  Rng rng(2);
  const RegressionFit f = fit_regression_hyperparameters(X, y, hyper1d(0.2, 0.1), rng);
  EXPECT_FALSE(f.used_defaults);
  EXPECT_GT(f.model.hyper().lengthscales[0], 0.2);
}
