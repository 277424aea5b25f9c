#include "pbo/loop/record.hpp"

#include "pbo/common/errors.hpp"
#include "pbo/sim/json.hpp"

namespace pbo::loop {

using nlohmann::json;

std::vector<cost::Duel> RunRecord::duels() const {
  std::vector<cost::Duel> out;
  for (const auto& e : entries) {
    if (e.duel) out.push_back(*e.duel);
  }
  return out;
}

void to_json(json& j, const ProposalInfo& p) {
  j = json{{"strategy", p.strategy},
           {"value", p.value},
           {"first_is_incumbent", p.first_is_incumbent},
           {"degenerate", p.degenerate},
           {"at_boundary", p.at_boundary},
           {"fallback", p.fallback},
           {"boundary_streak", p.boundary_streak}};
}

void from_json(const json& j, ProposalInfo& p) {
  p.strategy = j.at("strategy").get<std::string>();
  p.value = j.at("value").get<double>();
  p.first_is_incumbent = j.at("first_is_incumbent").get<bool>();
  p.degenerate = j.at("degenerate").get<bool>();
  p.at_boundary = j.at("at_boundary").get<bool>();
  p.fallback = j.at("fallback").get<bool>();
  p.boundary_streak = j.value("boundary_streak", 0);
}

namespace {

json entry_to_json(const Entry& e, bool include_timing) {
  json j{{"index", e.index},
         {"initial", e.initial},
         {"first", e.first},
         {"first_terms", e.first_terms},
         {"new_trials", e.new_trials},
         {"incumbent", e.incumbent},
         {"incumbent_terms", e.incumbent_terms}};
  if (e.second) j["second"] = *e.second;
  if (e.second_terms) j["second_terms"] = *e.second_terms;
  if (e.duel) j["duel"] = *e.duel;
  if (e.observed_cost) j["observed_cost"] = *e.observed_cost;
  if (e.proposal) j["proposal"] = *e.proposal;
  if (e.incumbent_cost) j["incumbent_cost"] = *e.incumbent_cost;
  if (e.hyper) j["hyper"] = *e.hyper;
  if (include_timing) j["wall_time_s"] = e.wall_time_s;
  return j;
}

Entry entry_from_json(const json& j) {
  Entry e;
  e.index = j.at("index").get<int>();
  e.initial = j.at("initial").get<bool>();
  e.first = j.at("first").get<sim::Trajectory>();
  e.first_terms = j.at("first_terms").get<cost::CostTerms>();
  e.new_trials = j.at("new_trials").get<int>();
  e.incumbent = j.at("incumbent").get<sim::ControlParams>();
  e.incumbent_terms = j.at("incumbent_terms").get<cost::CostTerms>();
  if (j.contains("second")) e.second = j["second"].get<sim::Trajectory>();
  if (j.contains("second_terms")) e.second_terms = j["second_terms"].get<cost::CostTerms>();
  if (j.contains("duel")) e.duel = j["duel"].get<cost::Duel>();
  if (j.contains("observed_cost")) e.observed_cost = j["observed_cost"].get<double>();
  if (j.contains("proposal")) e.proposal = j["proposal"].get<ProposalInfo>();
  if (j.contains("incumbent_cost")) e.incumbent_cost = j["incumbent_cost"].get<double>();
  if (j.contains("hyper")) e.hyper = j["hyper"].get<gp::KernelHyper>();
  e.wall_time_s = j.value("wall_time_s", 0.0);
  return e;
}

}  // namespace

json record_to_json(const RunRecord& r, bool include_timing) {
  json entries = json::array();
  for (const auto& e : r.entries) entries.push_back(entry_to_json(e, include_timing));
  json j{{"kind", r.kind == RunKind::Preference ? "preference" : "scalar"},
         {"config", r.config},
         {"trials", r.trials},
         {"entries", std::move(entries)}};
  if (r.model) j["model"] = *r.model;
  return j;
}

RunRecord record_from_json(const json& j) {
  try {
    RunRecord r;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "preference") r.kind = RunKind::Preference;
    else if (kind == "scalar") r.kind = RunKind::Scalar;
    else throw MalformedInput("unknown run kind '" + kind + "'");
    r.config = j.at("config").get<RunConfig>();
    r.trials = j.at("trials").get<int>();
    for (const auto& e : j.at("entries")) r.entries.push_back(entry_from_json(e));
    if (j.contains("model")) r.model = j["model"];
    return r;
  } catch (const json::exception& e) {
    throw MalformedInput(std::string("run record: ") + e.what());
  }
}

}  // namespace pbo::loop
