#include "pbo/loop/pbo_loop.hpp"

#include <chrono>

#include "pbo/common/errors.hpp"
#include "pbo/sim/trial.hpp"

namespace pbo::loop {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

PboLoop::PboLoop(RunConfig config) : config_(std::move(config)) {
  validate(config_);
  if (!acq::is_dueling_strategy(config_.strategy)) {
    throw MalformedInput("strategy: '" + config_.strategy + "' is not a dueling strategy");
  }
  const Eigen::Index dim = config_.bounds.dim();
  const int n_samples =
      config_.pairing == InitialPairing::Consecutive ? 2 * config_.n_initial : config_.n_initial + 1;
  initial_ = initial_samples(config_.seed, n_samples, dim);
  duels_ = gp::DuelSet(dim);
  hyper_ = gp::KernelHyper::defaults(dim, config_.initial_lengthscale);
  acq_rng_ = make_stream(config_.seed, "acq");
  oracle_rng_ = make_stream(config_.seed, "oracle");
  record_.kind = RunKind::Preference;
  record_.config = config_;
  prepare_next();
}

const PendingDuel& PboLoop::pending() const {
  if (!pending_) throw MalformedInput("run has finished; no pending duel");
  return *pending_;
}

sim::ControlParams PboLoop::incumbent() const { return incumbent_trajectory().params; }

const sim::Trajectory& PboLoop::incumbent_trajectory() const { return evaluated_.at(incumbent_).trajectory; }

int PboLoop::find_evaluated(const Eigen::VectorXd& unit) const {
  for (int i = static_cast<int>(evaluated_.size()) - 1; i >= 0; --i) {
    if ((evaluated_[i].unit - unit).cwiseAbs().maxCoeff() <= gp::DuelSet::kMergeTolerance) return i;
  }
  return -1;
}

int PboLoop::evaluate(const Eigen::VectorXd& unit, int& new_trials) {
  const Eigen::VectorXd u = clamp_unit(unit);
  if (config_.reuse_trials) {
    const int known = find_evaluated(u);
    if (known >= 0) return known;
  }
  const auto params = sim::ControlParams::from_vector(config_.bounds.from_unit(u));
  sim::Trajectory traj =
      sim::run_trial(params, config_.plant, derive_seed(config_.seed, "plant", static_cast<std::uint64_t>(record_.trials)));
  ++record_.trials;
  ++new_trials;
  const cost::CostTerms terms = cost::cost_terms(traj, config_.plant);
  evaluated_.push_back({u, std::move(traj), terms});
  return static_cast<int>(evaluated_.size()) - 1;
}

void PboLoop::prepare_next() {
  const auto start = Clock::now();
  const int k = resolved();
  if (k >= total()) {
    pending_.reset();
    if (model_) record_.model = nlohmann::json(*model_);
    return;
  }
  PendingDuel p;
  p.index = k;
  p.initial = k < config_.n_initial;
  Eigen::VectorXd a, b;
  if (p.initial) {
    if (config_.pairing == InitialPairing::Consecutive) {
      a = initial_.row(2 * k).transpose();
      b = initial_.row(2 * k + 1).transpose();
    } else {
      a = k == 0 ? Eigen::VectorXd(initial_.row(0).transpose()) : evaluated_[incumbent_].unit;
      b = initial_.row(k + 1).transpose();
    }
  } else {
    acq::DuelProposal prop;
    if (config_.strategy == acq::kRandom) {
      prop = acq::propose_random(config_.bounds.dim(), acq_rng_);
    } else if (!model_) {
      prop = acq::propose_random(config_.bounds.dim(), acq_rng_);
      prop.strategy = config_.strategy;
      prop.fallback = true;
    } else {
      prop = acq::propose(config_.strategy, *model_, acq_rng_, config_.acquisition);
    }
    boundary_streak_ = prop.at_boundary ? boundary_streak_ + 1 : 0;
    p.proposal = ProposalInfo{prop.strategy,  prop.value,    prop.first_is_incumbent, prop.degenerate,
                              prop.at_boundary, prop.fallback, boundary_streak_};
    a = prop.first;
    b = prop.second;
  }
  pending_first_ = evaluate(a, p.new_trials);
  pending_second_ = evaluate(b, p.new_trials);
  p.first_unit = evaluated_[pending_first_].unit;
  p.second_unit = evaluated_[pending_second_].unit;
  p.first = evaluated_[pending_first_].trajectory;
  p.second = evaluated_[pending_second_].trajectory;
  pending_ = std::move(p);
  pending_seconds_ = seconds_since(start);
}

void PboLoop::resolve(bool first_wins) {
  const PendingDuel& p = pending();
  cost::Duel d;
  d.winner = first_wins ? p.first.params : p.second.params;
  d.loser = first_wins ? p.second.params : p.first.params;
  d.source = cost::DuelSource::Human;
  d.iteration = p.index;
  d.winner_is_first = first_wins;
  d.winner_status = first_wins ? p.first.status : p.second.status;
  d.loser_status = first_wins ? p.second.status : p.first.status;
  record_choice(d);
}

void PboLoop::resolve_with_oracle() {
  if (!config_.oracle) throw MalformedInput("run has no oracle; choices must be supplied");
  const PendingDuel& p = pending();
  cost::Duel d = cost::simulated_expert(p.first, p.second, config_.oracle->weights, config_.plant,
                                        config_.oracle->noise_std, oracle_rng_);
  d.iteration = p.index;
  record_choice(d);
}

void PboLoop::refit() {
  if (duels_.empty()) {
    model_.reset();
    return;
  }
  if (config_.refit_hyperparameters && duels_.n_pairs() >= 2) {
    Rng rng = make_stream(config_.seed, "hyper", static_cast<std::uint64_t>(resolved()));
    hyper_ = gp::optimize_hyperparameters(duels_, hyper_, rng, config_.hyper_search).hyper;
  }
  try {
    model_ = gp::fit_laplace(duels_, hyper_);
  } catch (const ConvergenceError&) {
    hyper_ = gp::KernelHyper::defaults(config_.bounds.dim(), config_.initial_lengthscale);
    model_ = gp::fit_laplace(duels_, hyper_);
  }
}

int PboLoop::incumbent_index() const {
  if (!model_) return incumbent_;
  const int i = find_evaluated(acq::incumbent(*model_));
  if (i < 0) throw MalformedInput("incumbent has no recorded trial");
  return i;
}

void PboLoop::record_choice(const cost::Duel& duel) {
  const auto start = Clock::now();
  const PendingDuel p = *pending_;
  const Eigen::VectorXd& w = duel.winner_is_first ? p.first_unit : p.second_unit;
  const Eigen::VectorXd& l = duel.winner_is_first ? p.second_unit : p.first_unit;
  if ((w - l).cwiseAbs().maxCoeff() > gp::DuelSet::kMergeTolerance) duels_.add_duel(w, l);

  // Before the model has data the winner stands in as incumbent.
  incumbent_ = duel.winner_is_first ? pending_first_ : pending_second_;
  refit();
  incumbent_ = incumbent_index();

  Entry& e = record_.entries.emplace_back();
  e.index = p.index;
  e.initial = p.initial;
  e.first = p.first;
  e.first_terms = evaluated_[pending_first_].terms;
  e.second = p.second;
  e.second_terms = evaluated_[pending_second_].terms;
  e.duel = duel;
  e.proposal = p.proposal;
  e.new_trials = p.new_trials;
  const Evaluated& inc = evaluated_[incumbent_];
  e.incumbent = inc.trajectory.params;
  e.incumbent_terms = inc.terms;
  if (config_.oracle) e.incumbent_cost = cost::weighted_cost(inc.terms, config_.oracle->weights);
  if (model_) e.hyper = hyper_;
  e.wall_time_s = pending_seconds_ + seconds_since(start);
  prepare_next();
}

bool drive(PboLoop& loop, PreferenceSource& source) {
  while (!loop.finished()) {
    const auto choice = source.first_wins(loop.pending());
    if (!choice) return false;
    loop.resolve(*choice);
  }
  return true;
}

RunRecord run_pbo(const RunConfig& config) {
  PboLoop loop(config);
  while (!loop.finished()) loop.resolve_with_oracle();
  return loop.record();
}

}  // namespace pbo::loop
