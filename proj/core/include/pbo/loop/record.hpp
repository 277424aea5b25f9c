#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pbo/cost/cost.hpp"
#include "pbo/gp/kernel.hpp"
#include "pbo/loop/run_config.hpp"
#include "pbo/sim/types.hpp"

namespace pbo::loop {

// Diagnostics of the acquisition step behind one duel.
struct ProposalInfo {
  std::string strategy;
  double value = 0.0;
  bool first_is_incumbent = false;
  bool degenerate = false;
  bool at_boundary = false;
  bool fallback = false;
  int boundary_streak = 0;  // consecutive proposals touching the box boundary

  bool operator==(const ProposalInfo&) const = default;
};

// One step of a run. Preference runs fill `second` and `duel`; scalar runs
// fill `observed_cost` only.
struct Entry {
  int index = 0;
  bool initial = false;
  sim::Trajectory first;
  cost::CostTerms first_terms;
  std::optional<sim::Trajectory> second;
  std::optional<cost::CostTerms> second_terms;
  std::optional<cost::Duel> duel;
  std::optional<double> observed_cost;
  std::optional<ProposalInfo> proposal;
  int new_trials = 0;
  // Best point after this step and the cost terms of its trajectory.
  sim::ControlParams incumbent;
  cost::CostTerms incumbent_terms;
  std::optional<double> incumbent_cost;  // under the oracle weights, when there is an oracle
  std::optional<gp::KernelHyper> hyper;
  double wall_time_s = 0.0;
};

enum class RunKind { Preference, Scalar };

struct RunRecord {
  RunKind kind = RunKind::Preference;
  RunConfig config;
  std::vector<Entry> entries;
  int trials = 0;
  std::optional<nlohmann::json> model;  // final preference model snapshot

  std::vector<cost::Duel> duels() const;
};

// Wall time is left out unless requested so that identical runs serialize to
// identical bytes.
nlohmann::json record_to_json(const RunRecord& r, bool include_timing = false);
RunRecord record_from_json(const nlohmann::json& j);

void to_json(nlohmann::json& j, const ProposalInfo& p);
void from_json(const nlohmann::json& j, ProposalInfo& p);

}  // namespace pbo::loop
