#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "pbo/acquisition/strategies.hpp"
#include "pbo/gp/duel_set.hpp"
#include "pbo/gp/preference_model.hpp"
#include "pbo/loop/record.hpp"
#include "pbo/loop/run_config.hpp"

namespace pbo::loop {

// A duel whose trials have run and which waits for a choice.
struct PendingDuel {
  int index = 0;
  bool initial = false;
  Eigen::VectorXd first_unit;
  Eigen::VectorXd second_unit;
  sim::Trajectory first;
  sim::Trajectory second;
  std::optional<ProposalInfo> proposal;
  int new_trials = 0;
};

// Preference-driven optimization run as a resumable state machine. The
// constructor runs the first pair of trials; every resolve() records the
// choice, refits the model and prepares the next pair.
class PboLoop {
 public:
  explicit PboLoop(RunConfig config);

  const RunConfig& config() const { return config_; }
  bool finished() const { return !pending_.has_value(); }
  int resolved() const { return static_cast<int>(record_.entries.size()); }
  int total() const { return config_.total(); }
  // Throws MalformedInput when the run has finished.
  const PendingDuel& pending() const;

  // Records a choice made outside the loop (a person at the service).
  void resolve(bool first_wins);
  // Lets the configured oracle decide. Throws MalformedInput without an oracle.
  void resolve_with_oracle();

  const RunRecord& record() const { return record_; }
  const std::optional<gp::PreferenceModel>& model() const { return model_; }
  const gp::DuelSet& duels() const { return duels_; }
  const gp::KernelHyper& hyper() const { return hyper_; }
  // Incumbent after the last resolved duel (the first sample before any).
  sim::ControlParams incumbent() const;
  const sim::Trajectory& incumbent_trajectory() const;

 private:
  struct Evaluated {
    Eigen::VectorXd unit;
    sim::Trajectory trajectory;
    cost::CostTerms terms;
  };

  void record_choice(const cost::Duel& duel);
  void refit();
  void prepare_next();
  // Index into evaluated_, running a new trial unless the point is known.
  int evaluate(const Eigen::VectorXd& unit, int& new_trials);
  int find_evaluated(const Eigen::VectorXd& unit) const;
  int incumbent_index() const;

  RunConfig config_;
  Eigen::MatrixXd initial_;
  gp::DuelSet duels_;
  gp::KernelHyper hyper_;
  std::optional<gp::PreferenceModel> model_;
  std::vector<Evaluated> evaluated_;
  std::optional<PendingDuel> pending_;
  RunRecord record_;
  Rng acq_rng_;
  Rng oracle_rng_;
  int incumbent_ = 0;
  int pending_first_ = -1;  // indices into evaluated_
  int pending_second_ = -1;
  int boundary_streak_ = 0;
  double pending_seconds_ = 0.0;
};

// Supplies choices to a run. Returning nullopt suspends the run.
class PreferenceSource {
 public:
  virtual ~PreferenceSource() = default;
  virtual std::optional<bool> first_wins(const PendingDuel& duel) = 0;
};

// Drives the loop until it finishes (true) or the source suspends (false).
bool drive(PboLoop& loop, PreferenceSource& source);

// Oracle-driven run from start to finish.
RunRecord run_pbo(const RunConfig& config);

}  // namespace pbo::loop
