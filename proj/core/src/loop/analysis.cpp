#include "pbo/loop/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "pbo/common/errors.hpp"

namespace pbo::loop {

IncumbentLens weights_lens(const cost::CostWeights& w) {
  return [w](const Entry& e) { return cost::weighted_cost(e.incumbent_terms, w); };
}

IncumbentLens frozen_lens(const FrozenCostModel& model) {
  return [model](const Entry& e) { return model.cost(e.incumbent); };
}

Curve cumulative_min_curve(const std::vector<RunRecord>& records, const IncumbentLens& lens) {
  if (records.empty()) throw MalformedInput("no runs to aggregate");
  const std::size_t len = records.front().entries.size();
  for (const auto& r : records) {
    if (r.entries.size() != len) throw MalformedInput("runs differ in length");
  }
  const auto runs = static_cast<Eigen::Index>(records.size());
  Eigen::MatrixXd best(runs, static_cast<Eigen::Index>(len));
  for (Eigen::Index r = 0; r < runs; ++r) {
    double running = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < len; ++t) {
      running = std::min(running, lens(records[r].entries[t]));
      best(r, static_cast<Eigen::Index>(t)) = running;
    }
  }
  Curve c;
  c.mean = best.colwise().mean().transpose();
  c.std_error = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(len));
  if (runs > 1) {
    const Eigen::MatrixXd centered = best.rowwise() - c.mean.transpose();
    const double r = static_cast<double>(runs);
    c.std_error = (centered.array().square().colwise().sum() / (r - 1.0)).sqrt().transpose() / std::sqrt(r);
  }
  return c;
}

std::vector<JudgedDuel> judged_duels(const std::vector<RunRecord>& records) {
  std::vector<JudgedDuel> out;
  for (std::size_t r = 0; r < records.size(); ++r) {
    for (const auto& e : records[r].entries) {
      if (!e.duel) continue;
      JudgedDuel j;
      j.iteration = e.index;
      j.label = "run " + std::to_string(r) + " duel " + std::to_string(e.index);
      const std::optional<cost::CostTerms> first = e.first_terms;
      j.winner = e.duel->winner_is_first ? first : e.second_terms;
      j.loser = e.duel->winner_is_first ? e.second_terms : first;
      out.push_back(std::move(j));
    }
  }
  return out;
}

const std::vector<Lens>& agreement_lenses() {
  static const std::vector<Lens> lenses{{"J1", true, false, false},    {"J2", false, true, false},
                                        {"J3", false, false, true},    {"J1+J2", true, true, false},
                                        {"J1+J3", true, false, true},  {"J2+J3", false, true, true},
                                        {"total", true, true, true}};
  return lenses;
}

double lens_cost(const Lens& lens, const cost::CostTerms& t, const cost::CostWeights& w) {
  double c = 0.0;
  if (lens.j1) c += w.a1 * t.j1;
  if (lens.j2) c += w.a2 * t.j2;
  if (lens.j3) c += w.a3 * t.j3;
  return c;
}

std::vector<AgreementRow> agreement_analysis(const std::vector<JudgedDuel>& duels, const cost::CostWeights& w) {
  std::map<int, std::vector<const JudgedDuel*>> by_iteration;
  for (const auto& d : duels) {
    if (!d.winner || !d.loser) throw MalformedInput("missing cost terms for " + d.label);
    by_iteration[d.iteration].push_back(&d);
  }
  std::vector<AgreementRow> rows;
  for (const auto& [iteration, group] : by_iteration) {
    for (const auto& lens : agreement_lenses()) {
      int agree = 0;
      for (const JudgedDuel* d : group) {
        if (lens_cost(lens, *d->winner, w) <= lens_cost(lens, *d->loser, w)) ++agree;
      }
      const int n = static_cast<int>(group.size());
      rows.push_back({iteration, lens.name, static_cast<double>(agree) / n, n});
    }
  }
  return rows;
}

namespace {

Eigen::VectorXd average_ranks(const Eigen::VectorXd& v) {
  const auto n = static_cast<std::size_t>(v.size());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  Eigen::VectorXd rank(v.size());
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() < 2) throw MalformedInput("spearman needs two samples of equal size >= 2");
  const Eigen::VectorXd ra = average_ranks(a).array() - average_ranks(a).mean();
  const Eigen::VectorXd rb = average_ranks(b).array() - average_ranks(b).mean();
  const double denom = std::sqrt(ra.squaredNorm() * rb.squaredNorm());
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return ra.dot(rb) / denom;
}

}  // namespace pbo::loop
