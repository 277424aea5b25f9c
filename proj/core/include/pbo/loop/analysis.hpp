#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pbo/cost/cost.hpp"
#include "pbo/loop/frozen_cost.hpp"
#include "pbo/loop/record.hpp"

namespace pbo::loop {

// Cost of the incumbent recorded on an entry.
using IncumbentLens = std::function<double(const Entry&)>;

IncumbentLens weights_lens(const cost::CostWeights& w);
IncumbentLens frozen_lens(const FrozenCostModel& model);

struct Curve {
  Eigen::VectorXd mean;
  Eigen::VectorXd std_error;  // sample standard deviation / sqrt(runs); 0 for one run
};

// Cumulative minimum of the lens cost per entry, averaged over runs.
// Throws MalformedInput if the runs differ in length or the list is empty.
Curve cumulative_min_curve(const std::vector<RunRecord>& records, const IncumbentLens& lens);

// One comparison for the agreement table.
struct JudgedDuel {
  int iteration = 0;
  std::string label;  // names the duel in errors
  std::optional<cost::CostTerms> winner;
  std::optional<cost::CostTerms> loser;
};

std::vector<JudgedDuel> judged_duels(const std::vector<RunRecord>& records);

// Cost lenses: single terms, pairwise sums and the total, all weighted.
struct Lens {
  std::string name;
  bool j1 = false;
  bool j2 = false;
  bool j3 = false;
};
const std::vector<Lens>& agreement_lenses();
double lens_cost(const Lens& lens, const cost::CostTerms& terms, const cost::CostWeights& w);

struct AgreementRow {
  int iteration = 0;
  std::string lens;
  double fraction = 0.0;
  int count = 0;
};

// Per lens and iteration: share of duels whose winner has a lens cost no
// higher than the loser's. Throws MalformedInput naming a duel without terms.
std::vector<AgreementRow> agreement_analysis(const std::vector<JudgedDuel>& duels, const cost::CostWeights& w);

// Spearman rank correlation with average ranks for ties.
double spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace pbo::loop
