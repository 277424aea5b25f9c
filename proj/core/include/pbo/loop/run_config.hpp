#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "pbo/acquisition/strategies.hpp"
#include "pbo/common/box.hpp"
#include "pbo/common/random.hpp"
#include "pbo/cost/cost.hpp"
#include "pbo/gp/hyper_search.hpp"
#include "pbo/sim/types.hpp"

namespace pbo::loop {

// How the initial random samples are turned into comparisons.
enum class InitialPairing {
  Consecutive,      // 2n samples, duels (1 v 2), (3 v 4), ...
  VersusIncumbent,  // n + 1 samples, each new sample duels the current incumbent
};

std::string to_string(InitialPairing p);
InitialPairing initial_pairing_from_string(const std::string& s);

struct OracleSpec {
  cost::CostWeights weights = cost::CostWeights::expert();
  double noise_std = 0.0;  // decision noise on the weighted cost
};

struct RunConfig {
  std::string strategy = "eubo";
  int n_initial = 12;    // initial random comparisons
  int n_iterations = 15;  // strategy-driven comparisons
  std::uint64_t seed = 0;
  Box bounds = sim::default_param_box();
  std::optional<OracleSpec> oracle = OracleSpec{};  // empty: choices come from a person
  sim::PlantConfig plant;
  InitialPairing pairing = InitialPairing::Consecutive;
  bool refit_hyperparameters = true;
  bool reuse_trials = true;  // previously evaluated points keep their trajectory
  double initial_lengthscale = 0.5;
  acq::AcquisitionOptions acquisition;
  gp::HyperSearchOptions hyper_search;

  int total() const { return n_initial + n_iterations; }

  // Two initial comparisons followed by thirteen strategy-driven ones, no oracle.
  static RunConfig human_session();
};

// Throws MalformedInput naming the offending field.
void validate(const RunConfig& config);

// Initial samples for a seed, in the unit box. Identical across strategies.
Eigen::MatrixXd initial_samples(std::uint64_t seed, int n, Eigen::Index dim);

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);

}  // namespace pbo::loop
