#include "pbo/loop/run_config.hpp"

#include <cmath>

#include "pbo/common/errors.hpp"
#include "pbo/sim/json.hpp"

namespace pbo::loop {

using nlohmann::json;

std::string to_string(InitialPairing p) {
  return p == InitialPairing::Consecutive ? "consecutive" : "versus_incumbent";
}

InitialPairing initial_pairing_from_string(const std::string& s) {
  if (s == "consecutive") return InitialPairing::Consecutive;
  if (s == "versus_incumbent") return InitialPairing::VersusIncumbent;
  throw MalformedInput("unknown initial pairing '" + s + "'");
}

RunConfig RunConfig::human_session() {
  RunConfig c;
  c.strategy = "eubo";
  c.n_initial = 2;
  c.n_iterations = 13;
  c.oracle.reset();
  return c;
}

void validate(const RunConfig& c) {
  if (!acq::is_dueling_strategy(c.strategy) && c.strategy != acq::kVanillaEi && c.strategy != acq::kVanillaUcb) {
    throw MalformedInput("strategy: unknown id '" + c.strategy + "'");
  }
  if (c.n_initial < 1) throw MalformedInput("n_initial: must be at least 1");
  if (c.n_iterations < 0) throw MalformedInput("n_iterations: must be non-negative");
  if (c.bounds.dim() != 4) throw MalformedInput("bounds: expected 4 dimensions");
  if (!((c.bounds.upper() - c.bounds.lower()).array() > 0.0).all() || !(c.bounds.lower().array() > 0.0).all()) {
    throw MalformedInput("bounds: need 0 < lower < upper");
  }
  if (c.oracle) {
    try {
      cost::validate(c.oracle->weights);
    } catch (const MalformedInput& e) {
      throw MalformedInput(std::string("oracle.weights: ") + e.what());
    }
    if (!(c.oracle->noise_std >= 0.0) || !std::isfinite(c.oracle->noise_std)) {
      throw MalformedInput("oracle.noise_std: must be finite and non-negative");
    }
  }
  try {
    sim::validate(c.plant);
  } catch (const MalformedInput& e) {
    throw MalformedInput(std::string("plant: ") + e.what());
  }
  if (!(c.initial_lengthscale > 0.0)) throw MalformedInput("initial_lengthscale: must be positive");
  if (!(c.acquisition.beta >= 0.0)) throw MalformedInput("beta: must be non-negative");
  if (!(c.acquisition.kappa >= 0.0)) throw MalformedInput("kappa: must be non-negative");
  if (c.acquisition.thompson_grid < 1) throw MalformedInput("thompson_grid: must be positive");
}

Eigen::MatrixXd initial_samples(std::uint64_t seed, int n, Eigen::Index dim) {
  Rng rng = make_stream(seed, "init");
  Eigen::MatrixXd X(n, dim);
  for (int i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < dim; ++k) X(i, k) = uniform01(rng);
  }
  return X;
}

void to_json(json& j, const RunConfig& c) {
  j = json{{"strategy", c.strategy},
           {"n_initial", c.n_initial},
           {"n_iterations", c.n_iterations},
           {"seed", c.seed},
           {"bounds",
            {{"lower", std::vector<double>(c.bounds.lower().begin(), c.bounds.lower().end())},
             {"upper", std::vector<double>(c.bounds.upper().begin(), c.bounds.upper().end())}}},
           {"plant", c.plant},
           {"pairing", to_string(c.pairing)},
           {"refit_hyperparameters", c.refit_hyperparameters},
           {"reuse_trials", c.reuse_trials},
           {"initial_lengthscale", c.initial_lengthscale},
           {"beta", c.acquisition.beta},
           {"kappa", c.acquisition.kappa},
           {"thompson_grid", c.acquisition.thompson_grid},
           {"reflect_boundary", c.acquisition.reflect_boundary}};
  if (c.oracle) {
    j["oracle"] = json{{"weights", c.oracle->weights}, {"noise_std", c.oracle->noise_std}};
  } else {
    j["oracle"] = "human";
  }
}

// Missing keys keep their defaults so a request body can be partial.
void from_json(const json& j, RunConfig& c) {
  if (!j.is_object()) throw MalformedInput("run config must be a JSON object");
  c = RunConfig{};
  auto field = [&](const char* key, auto& out) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(out);
    } catch (const json::exception& e) {
      throw MalformedInput(std::string(key) + ": " + e.what());
    }
  };
  field("strategy", c.strategy);
  field("n_initial", c.n_initial);
  field("n_iterations", c.n_iterations);
  field("seed", c.seed);
  if (j.contains("bounds")) {
    try {
      const auto lo = j["bounds"].at("lower").get<std::vector<double>>();
      const auto hi = j["bounds"].at("upper").get<std::vector<double>>();
      if (lo.size() != hi.size()) throw MalformedInput("bounds: lower and upper differ in size");
      c.bounds = Box(Eigen::Map<const Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size())),
                     Eigen::Map<const Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size())));
    } catch (const json::exception& e) {
      throw MalformedInput(std::string("bounds: ") + e.what());
    }
  }
  if (j.contains("plant")) {
    try {
      c.plant = j["plant"].get<sim::PlantConfig>();
    } catch (const json::exception& e) {
      throw MalformedInput(std::string("plant: ") + e.what());
    }
  }
  if (j.contains("pairing")) {
    if (!j["pairing"].is_string()) throw MalformedInput("pairing: expected a string");
    c.pairing = initial_pairing_from_string(j["pairing"].get<std::string>());
  }
  field("refit_hyperparameters", c.refit_hyperparameters);
  field("reuse_trials", c.reuse_trials);
  field("initial_lengthscale", c.initial_lengthscale);
  field("beta", c.acquisition.beta);
  field("kappa", c.acquisition.kappa);
  field("thompson_grid", c.acquisition.thompson_grid);
  field("reflect_boundary", c.acquisition.reflect_boundary);
  if (j.contains("oracle")) {
    const auto& o = j["oracle"];
    if (o.is_string() && o.get<std::string>() == "human") {
      c.oracle.reset();
    } else if (o.is_object()) {
      OracleSpec spec;
      try {
        if (o.contains("weights")) spec.weights = o["weights"].get<cost::CostWeights>();
        if (o.contains("noise_std")) spec.noise_std = o["noise_std"].get<double>();
      } catch (const json::exception& e) {
        throw MalformedInput(std::string("oracle: ") + e.what());
      }
      c.oracle = spec;
    } else {
      throw MalformedInput("oracle: expected \"human\" or {weights, noise_std}");
    }
  }
}

}  // namespace pbo::loop
