#include "pbo/loop/vanilla_bo.hpp"

#include <chrono>
#include <cmath>

#include "pbo/common/errors.hpp"
#include "pbo/gp/regression.hpp"
#include "pbo/sim/trial.hpp"

namespace pbo::loop {

ScalarBoTrace minimize_scalar(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::Index dim,
                              std::uint64_t seed, const ScalarBoOptions& options,
                              const std::function<void(Eigen::Index)>& on_evaluation) {
  if (options.n_initial < 1) throw MalformedInput("scalar BO needs at least one initial sample");
  if (options.n_iterations < 0) throw MalformedInput("scalar BO iteration count must be non-negative");
  const Eigen::Index total = options.n_initial + options.n_iterations;
  ScalarBoTrace trace;
  trace.points.resize(total, dim);
  trace.costs.resize(total);
  Eigen::Index n = 0;
  auto observe = [&](const Eigen::VectorXd& x) {
    trace.points.row(n) = x.transpose();
    trace.costs[n] = f(x);
    const Eigen::Index prev = trace.best.empty() ? n : trace.best.back();
    trace.best.push_back(trace.costs[n] < trace.costs[prev] ? n : prev);
    if (on_evaluation) on_evaluation(n);
    ++n;
  };

  const Eigen::MatrixXd init = initial_samples(seed, options.n_initial, dim);
  for (Eigen::Index i = 0; i < init.rows(); ++i) observe(init.row(i).transpose());

  Rng acq_rng = make_stream(seed, "acq");
  gp::KernelHyper hyper = gp::KernelHyper::defaults(dim, options.initial_lengthscale);
  for (int it = 0; it < options.n_iterations; ++it) {
    const Eigen::VectorXd y = trace.costs.head(n);
    const double mu = y.mean();
    double sd = std::sqrt((y.array() - mu).square().sum() / static_cast<double>(n));
    if (!(sd > 1e-12)) sd = 1.0;
    const Eigen::VectorXd z = -(y.array() - mu) / sd;
    Rng hyper_rng = make_stream(seed, "hyper", static_cast<std::uint64_t>(n));
    const auto fit =
        gp::fit_regression_hyperparameters(trace.points.topRows(n), z, hyper, hyper_rng, options.hyper_search);
    hyper = fit.model.hyper();
    observe(acq::propose_scalar(fit.model, options.acquisition, z.maxCoeff(), acq_rng, options.acquisition_options));
  }
  return trace;
}

RunRecord run_vanilla_bo(const RunConfig& config, const TrajectoryCost& cost) {
  validate(config);
  if (config.strategy != acq::kVanillaEi && config.strategy != acq::kVanillaUcb) {
    throw MalformedInput("strategy: scalar BO needs vanilla_ei or vanilla_ucb, got '" + config.strategy + "'");
  }
  ScalarBoOptions opts;
  opts.n_initial = config.pairing == InitialPairing::Consecutive ? 2 * config.n_initial : config.n_initial + 1;
  opts.n_iterations = config.n_iterations;
  opts.acquisition = config.strategy == acq::kVanillaEi ? acq::ScalarAcquisition::Ei : acq::ScalarAcquisition::Ucb;
  opts.initial_lengthscale = config.initial_lengthscale;
  opts.acquisition_options = config.acquisition;
  opts.hyper_search = config.hyper_search;

  RunRecord record;
  record.kind = RunKind::Scalar;
  record.config = config;
  std::vector<sim::Trajectory> trajectories;
  std::vector<cost::CostTerms> terms;
  using Clock = std::chrono::steady_clock;
  auto last = Clock::now();

  auto f = [&](const Eigen::VectorXd& unit) {
    const auto params = sim::ControlParams::from_vector(config.bounds.from_unit(clamp_unit(unit)));
    trajectories.push_back(sim::run_trial(params, config.plant,
                                          derive_seed(config.seed, "plant", static_cast<std::uint64_t>(record.trials))));
    ++record.trials;
    terms.push_back(cost::cost_terms(trajectories.back(), config.plant));
    return cost(trajectories.back());
  };
  std::vector<double> costs;
  Eigen::Index best = 0;
  auto on_evaluation = [&](Eigen::Index i) {
    const double c = cost(trajectories[i]);
    costs.push_back(c);
    if (c < costs[best]) best = i;
    Entry& e = record.entries.emplace_back();
    e.index = static_cast<int>(i);
    e.initial = i < opts.n_initial;
    e.first = trajectories[i];
    e.first_terms = terms[i];
    e.observed_cost = c;
    e.new_trials = 1;
    e.incumbent = trajectories[best].params;
    e.incumbent_terms = terms[best];
    if (config.oracle) e.incumbent_cost = cost::weighted_cost(terms[best], config.oracle->weights);
    const auto now = Clock::now();
    e.wall_time_s = std::chrono::duration<double>(now - last).count();
    last = now;
  };
  minimize_scalar(f, config.bounds.dim(), config.seed, opts, on_evaluation);
  return record;
}

}  // namespace pbo::loop
