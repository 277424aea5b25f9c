// Command-line front end: preference runs, scalar BO, data-driven cost
// extraction and the CSV reports.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pbo/common/errors.hpp"
#include "pbo/loop/analysis.hpp"
#include "pbo/loop/frozen_cost.hpp"
#include "pbo/loop/pbo_loop.hpp"
#include "pbo/loop/vanilla_bo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pbo;

namespace {

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash != std::string::npos && dash > 0) {
      const auto lo = std::stoull(item.substr(0, dash)), hi = std::stoull(item.substr(dash + 1));
      for (auto k = lo; k <= hi; ++k) out.push_back(k);
    } else {
      out.push_back(std::stoull(item));
    }
  }
  return out;
}

cost::CostWeights parse_weights(const std::string& s) {
  const auto v = parse_doubles(s);
  if (v.size() != 3) throw MalformedInput("weights need three comma-separated values");
  cost::CostWeights w{v[0], v[1], v[2]};
  cost::validate(w);
  return w;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw MalformedInput("cannot read " + p.string());
  return json::parse(in);
}

void write_json(const fs::path& p, const json& j) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  out << j.dump(1) << '\n';
  if (!out) throw MalformedInput("cannot write " + p.string());
}

// Run records and session archives found directly under dir, by file name.
std::vector<loop::RunRecord> load_runs(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<loop::RunRecord> runs;
  for (const auto& f : files) {
    const json j = read_json(f);
    if (j.contains("kind") && j.contains("entries")) runs.push_back(loop::record_from_json(j));
    else if (j.contains("record")) runs.push_back(loop::record_from_json(j["record"]));
  }
  if (runs.empty()) throw MalformedInput("no run records under " + dir.string());
  return runs;
}

struct CommonRunOptions {
  std::string seeds = "0";
  int initial = 12;
  int iters = 15;
  std::string oracle_weights = "0.1,1,1";
  double oracle_noise = 0.0;
  std::string out = "runs";
  bool timing = false;
};

loop::RunConfig base_config(const CommonRunOptions& o, const std::string& strategy) {
  loop::RunConfig c;
  c.strategy = strategy;
  c.n_initial = o.initial;
  c.n_iterations = o.iters;
  c.oracle = loop::OracleSpec{parse_weights(o.oracle_weights), o.oracle_noise};
  return c;
}

void add_common(CLI::App* app, CommonRunOptions& o) {
  app->add_option("--seeds", o.seeds, "Comma-separated seeds, ranges like 0-9 allowed")->capture_default_str();
  app->add_option("--initial", o.initial, "Initial random comparisons")->capture_default_str();
  app->add_option("--iters", o.iters, "Strategy-driven iterations")->capture_default_str();
  app->add_option("--oracle-weights", o.oracle_weights, "Oracle cost weights a1,a2,a3")->capture_default_str();
  app->add_option("--oracle-noise", o.oracle_noise, "Decision noise of the oracle")->capture_default_str();
  app->add_option("--out", o.out, "Output directory for run records")->capture_default_str();
  app->add_flag("--timing", o.timing, "Include per-step wall time in the records");
}

void save_run(const CommonRunOptions& o, const loop::RunRecord& r) {
  const fs::path path = fs::path(o.out) / (r.config.strategy + "_seed" + std::to_string(r.config.seed) + ".json");
  write_json(path, loop::record_to_json(r, o.timing));
  const auto& last = r.entries.back();
  std::cerr << r.config.strategy << " seed " << r.config.seed << ": " << r.entries.size() << " steps, " << r.trials
            << " trials";
  if (last.incumbent_cost) std::cerr << ", incumbent cost " << *last.incumbent_cost;
  std::cerr << " -> " << path.string() << '\n';
}

void write_csv_header(std::ofstream& out, const char* header) {
  out << header << '\n';
  out << std::setprecision(10);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Preferential Bayesian optimization on the simulated pusher-slider"};
  app.require_subcommand(1);

  CommonRunOptions run_opts;
  std::string strategy = "eubo";
  auto* run = app.add_subcommand("run", "Oracle-driven preference runs, one record per seed");
  run->add_option("--strategy", strategy, "Strategy id")->required();
  add_common(run, run_opts);

  CommonRunOptions bo_opts;
  bo_opts.out = "bo_runs";
  std::string bo_cost = "expert";
  std::string bo_strategy = "vanilla_ei";
  auto* bo = app.add_subcommand("bo", "Scalar-feedback BO on the expert cost or a frozen preference model");
  bo->add_option("--cost", bo_cost, "expert or frozen:PATH")->capture_default_str();
  bo->add_option("--strategy", bo_strategy, "vanilla_ei or vanilla_ucb")->capture_default_str();
  add_common(bo, bo_opts);

  std::string extract_runs, extract_out = "model.json";
  std::uint64_t extract_seed = 0;
  auto* extract = app.add_subcommand("extract", "Fit and freeze a preference model on every duel in a directory");
  extract->add_option("--runs", extract_runs, "Directory of run records or session exports")->required();
  extract->add_option("--out", extract_out, "Output model file")->capture_default_str();
  extract->add_option("--seed", extract_seed, "Seed of the hyperparameter search")->capture_default_str();

  std::string curves_runs, curves_lens = "oracle", curves_csv = "curves.csv", curves_strategy;
  auto* curves = app.add_subcommand("curves", "Mean and standard error of the cumulative-minimum cost");
  curves->add_option("--runs", curves_runs, "Directory of run records")->required();
  curves->add_option("--lens", curves_lens, "oracle, refined or frozen:PATH")->capture_default_str();
  curves->add_option("--csv", curves_csv, "Output CSV")->capture_default_str();
  curves->add_option("--strategy", curves_strategy, "Only runs of this strategy");

  std::string agree_runs, agree_csv = "agreement.csv", agree_weights = "0.1,1,1";
  auto* agreement = app.add_subcommand("agreement", "Per-iteration agreement of choices with cost lenses");
  agreement->add_option("--runs", agree_runs, "Directory of run records or session exports")->required();
  agreement->add_option("--csv", agree_csv, "Output CSV")->capture_default_str();
  agreement->add_option("--weights", agree_weights, "Lens weights a1,a2,a3")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      for (const auto seed : parse_seeds(run_opts.seeds)) {
        loop::RunConfig c = base_config(run_opts, strategy);
        c.seed = seed;
        if (c.strategy == acq::kVanillaEi || c.strategy == acq::kVanillaUcb) {
          const auto w = c.oracle->weights;
          const auto plant = c.plant;
          save_run(run_opts, loop::run_vanilla_bo(c, [=](const sim::Trajectory& t) {
                     return cost::weighted_cost(cost::cost_terms(t, plant), w);
                   }));
        } else {
          save_run(run_opts, loop::run_pbo(c));
        }
      }
    } else if (*bo) {
      std::optional<loop::FrozenCostModel> frozen;
      if (bo_cost.rfind("frozen:", 0) == 0) {
        frozen = loop::frozen_from_json(read_json(bo_cost.substr(7)));
      } else if (bo_cost != "expert") {
        throw MalformedInput("--cost must be expert or frozen:PATH");
      }
      for (const auto seed : parse_seeds(bo_opts.seeds)) {
        loop::RunConfig c = base_config(bo_opts, bo_strategy);
        c.seed = seed;
        loop::TrajectoryCost f;
        if (frozen) {
          f = [&](const sim::Trajectory& t) { return frozen->cost(t.params); };
        } else {
          const auto w = c.oracle->weights;
          const auto plant = c.plant;
          f = [=](const sim::Trajectory& t) { return cost::weighted_cost(cost::cost_terms(t, plant), w); };
        }
        save_run(bo_opts, loop::run_vanilla_bo(c, f));
      }
    } else if (*extract) {
      const auto runs = load_runs(extract_runs);
      std::vector<cost::Duel> duels;
      for (const auto& r : runs) {
        const auto d = r.duels();
        duels.insert(duels.end(), d.begin(), d.end());
      }
      const auto model = loop::extract_datadriven_cost(duels, runs.front().config.bounds, extract_seed);
      write_json(extract_out, json(model));
      std::cerr << "frozen model from " << duels.size() << " duels in " << runs.size() << " runs -> " << extract_out
                << '\n';
    } else if (*curves) {
      auto runs = load_runs(curves_runs);
      if (!curves_strategy.empty()) {
        std::erase_if(runs, [&](const loop::RunRecord& r) { return r.config.strategy != curves_strategy; });
        if (runs.empty()) throw MalformedInput("no runs of strategy " + curves_strategy);
      }
      loop::IncumbentLens lens;
      if (curves_lens == "oracle") {
        const auto& o = runs.front().config.oracle;
        lens = loop::weights_lens(o ? o->weights : cost::CostWeights::expert());
      } else if (curves_lens == "refined") {
        lens = loop::weights_lens(cost::CostWeights::refined());
      } else if (curves_lens.rfind("frozen:", 0) == 0) {
        lens = loop::frozen_lens(loop::frozen_from_json(read_json(curves_lens.substr(7))));
      } else {
        throw MalformedInput("--lens must be oracle, refined or frozen:PATH");
      }
      const loop::Curve c = loop::cumulative_min_curve(runs, lens);
      std::ofstream out(curves_csv);
      write_csv_header(out, "iteration,mean,stderr");
      for (Eigen::Index i = 0; i < c.mean.size(); ++i) out << i + 1 << ',' << c.mean[i] << ',' << c.std_error[i] << '\n';
      std::cerr << runs.size() << " runs -> " << curves_csv << '\n';
    } else if (*agreement) {
      const auto rows = loop::agreement_analysis(loop::judged_duels(load_runs(agree_runs)), parse_weights(agree_weights));
      std::ofstream out(agree_csv);
      write_csv_header(out, "iteration,lens,agreement_fraction");
      for (const auto& r : rows) out << r.iteration + 1 << ',' << r.lens << ',' << r.fraction << '\n';
      std::cerr << rows.size() << " rows -> " << agree_csv << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
