// Exit criteria for the toolkit. Each criterion prints one line:
//   PASS <name> (<seconds>s): <detail>
//   FAIL <name> (<seconds>s): <detail>
// Usage: pbo_acceptance [--criterion NAME]... [--list]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "../support/quadrature.hpp"
#include "pbo/acquisition/strategies.hpp"
#include "pbo/common/normal.hpp"
#include "pbo/common/random.hpp"
#include "pbo/cost/cost.hpp"
#include "pbo/gp/likelihood.hpp"
#include "pbo/gp/preference_model.hpp"
#include "pbo/loop/analysis.hpp"
#include "pbo/loop/frozen_cost.hpp"
#include "pbo/loop/pbo_loop.hpp"
#include "pbo/loop/vanilla_bo.hpp"
#include "pbo/service/session_store.hpp"
#include "pbo/sim/trial.hpp"

using namespace pbo;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double max_seconds;
  std::function<Outcome()> check;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double standard_error(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

// ---------------------------------------------------------------------------

sim::Trajectory constructed(int n, double dt, double d, double end_x, double end_y) {
  sim::Trajectory t;
  t.config_hash = sim::config_hash(sim::PlantConfig{});
  t.dt = dt;
  for (int k = 0; k < n; ++k) {
    const double f = n > 1 ? static_cast<double>(k) / (n - 1) : 1.0;
    t.states.push_back({end_x * f, end_y * f, 0.0, d});
    if (k + 1 < n) t.commands.push_back({1.0, 0.0});
  }
  return t;
}

Outcome cost_formulas() {
  const sim::PlantConfig plant;
  int checked = 0;
  for (int n : {1, 2, 17, 61, 200, 600}) {
    for (double d : {-2.5, 0.0, 1.25}) {
      const sim::Trajectory t = constructed(n, plant.dt, d, plant.goal_x, plant.goal_y);
      const cost::CostTerms c = cost::cost_terms(t, plant);
      if (c.j1 != (n - 1) * plant.dt || c.j2 != 0.0 || c.j3 != 0.0) {
        return {false, "N=" + std::to_string(n) + " d=" + fmt(d) + ": J=(" + fmt(c.j1, 17) + ", " + fmt(c.j2) + ", " +
                           fmt(c.j3) + ")"};
      }
      ++checked;
    }
  }
  return {true, std::to_string(checked) + " constructed trajectories exact"};
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd matern_gram(const std::vector<double>& xs, double ls) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      K(i, j) = oracle::matern52_1d(xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)], ls, 1.0);
  K.diagonal().array() += 1e-8;
  return K;
}

// Largest |Laplace mean - quadrature mean| over the points.
double laplace_vs_quadrature(const std::vector<double>& xs, const std::vector<std::pair<int, int>>& duels,
                             int nodes) {
  const double sigma = 0.1, ls = 0.5;
  gp::DuelSet d(1);
  for (const auto& [w, l] : duels) {
    d.add_duel(Eigen::VectorXd::Constant(1, xs[static_cast<std::size_t>(w)]),
               Eigen::VectorXd::Constant(1, xs[static_cast<std::size_t>(l)]));
  }
  gp::KernelHyper h = gp::KernelHyper::defaults(1, ls);
  h.noise_std = sigma;
  h.signal_variance = 1.0;
  const gp::PreferenceModel m = gp::fit_laplace(d, h);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) X(static_cast<Eigen::Index>(i), 0) = xs[i];
  const Eigen::VectorXd laplace = m.predict_mean(X);
  const auto q = oracle::probit_posterior_quadrature(matern_gram(xs, ls), duels, sigma, nodes);
  return (laplace - q.mean).cwiseAbs().maxCoeff();
}

Outcome likelihood_posterior() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-3.0, 3.0), s(0.01, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double uw = u(rng), ul = u(rng), sigma = s(rng);
    const double expected = 0.5 * std::erfc(-(uw - ul) / (std::numbers::sqrt2 * sigma) / std::numbers::sqrt2);
    worst = std::max(worst, std::abs(gp::pref_likelihood(uw, ul, sigma) - expected));
  }
  const double two = laplace_vs_quadrature({0.25, 0.75}, {{0, 1}}, 801);
  const double three = laplace_vs_quadrature({0.25, 0.5, 0.75}, {{0, 1}, {1, 2}}, 161);
  const bool pass = worst <= 1e-12 && two <= 0.02 && three <= 0.05;
  return {pass, "likelihood max err " + fmt(worst) + " (tol 1e-12); 2-point mean diff " + fmt(two) +
                    " (tol 0.02); 3-point mean diff " + fmt(three) + " (tol 0.05)"};
}

// ---------------------------------------------------------------------------

gp::PreferenceModel peaked_model() {
  Rng rng(3);
  gp::DuelSet d(2);
  auto utility = [](const Eigen::Vector2d& x) { return -(x - Eigen::Vector2d(0.7, 0.3)).squaredNorm(); };
  for (int i = 0; i < 10; ++i) {
    const Eigen::Vector2d a(uniform01(rng), uniform01(rng)), b(uniform01(rng), uniform01(rng));
    if (utility(a) >= utility(b)) d.add_duel(a, b);
    else d.add_duel(b, a);
  }
  gp::KernelHyper h = gp::KernelHyper::defaults(2, 0.3);
  h.noise_std = 0.1;
  return gp::fit_laplace(d, h);
}

Outcome eubo_closed_form() {
  const gp::PreferenceModel m = peaked_model();
  Rng rng(77);
  std::mt19937_64 mc(99);
  std::normal_distribution<double> z;
  double worst = 0.0, worst_se = 0.0;
  bool self_exact = true;
  for (int t = 0; t < 20; ++t) {
    const Eigen::Vector2d x1(uniform01(rng), uniform01(rng)), x2(uniform01(rng), uniform01(rng));
    Eigen::MatrixXd X(2, 2);
    X.row(0) = x1.transpose();
    X.row(1) = x2.transpose();
    const gp::Prediction p = m.predict(X);
    const double closed = acq::eubo(m, x1, x2);
    // Sample the bivariate predictive through its Cholesky factor. The first
    // utility has a known mean, so it serves as a control variate:
    // max(u1, u2) = u1 + max(0, u2 - u1).
    const double l11 = std::sqrt(p.cov(0, 0));
    const double l21 = p.cov(1, 0) / l11;
    const double l22 = std::sqrt(std::max(0.0, p.cov(1, 1) - l21 * l21));
    double acc = 0.0, acc2 = 0.0;
    for (int i = 0; i < 1000000; ++i) {
      const double z1 = z(mc), z2 = z(mc);
      const double v = std::max(0.0, p.mean[1] + l21 * z1 + l22 * z2 - p.mean[0] - l11 * z1);
      acc += v;
      acc2 += v * v;
    }
    const double mc_mean = acc / 1e6;
    const double diff = std::abs(closed - (p.mean[0] + mc_mean));
    if (diff > worst) {
      worst = diff;
      worst_se = std::sqrt((acc2 / 1e6 - mc_mean * mc_mean) / 1e6);
    }
    self_exact = self_exact && acq::eubo(m, x1, x1) == m.predict_mean(x1.transpose())[0];
  }
  return {worst <= 0.002 && self_exact,
          "max |closed - MC| over 20 tuples " + fmt(worst) + " (MC standard error there " + fmt(worst_se, 2) + ", tol 0.002); eubo(x,x)=mu " + (self_exact ? "exact" : "NOT exact")};
}

// ---------------------------------------------------------------------------

Outcome protocol_fidelity() {
  std::string detail;
  bool pass = true;
  for (const auto& [initial, iters, expected] : {std::tuple{12, 15, 27}, std::tuple{2, 13, 15}}) {
    loop::RunConfig c;
    c.n_initial = initial;
    c.n_iterations = iters;
    const auto t0 = std::chrono::steady_clock::now();
    const loop::RunRecord r = loop::run_pbo(c);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const int n = static_cast<int>(r.entries.size());
    pass = pass && n == expected && secs < 120.0;
    detail += "(" + std::to_string(initial) + "," + std::to_string(iters) + ") -> " + std::to_string(n) +
              " entries in " + fmt(secs, 3) + "s; ";
  }
  return {pass, detail};
}

// ---------------------------------------------------------------------------

// Final cumulative-minimum oracle cost of the incumbent.
double final_cummin(const loop::RunRecord& r) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : r.entries) best = std::min(best, *e.incumbent_cost);
  return best;
}

Outcome benchmark_property() {
  const std::vector<std::string> strategies{"random", "eubo", "duel_ucb", "eiig", "hb_ei", "muc"};
  constexpr std::uint64_t kSeeds = 40;
  std::map<std::string, double> med, se;
  for (const auto& s : strategies) {
    std::vector<double> finals;
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
      loop::RunConfig c;
      c.strategy = s;
      c.seed = seed;
      c.oracle = loop::OracleSpec{cost::CostWeights::expert(), 0.0};
      finals.push_back(final_cummin(loop::run_pbo(c)));
    }
    med[s] = median(finals);
    se[s] = standard_error(finals);
  }
  std::vector<double> ses;
  for (const auto& s : strategies) ses.push_back(se[s]);
  const double median_se = median(ses);
  bool pass = true;
  std::string detail = std::to_string(kSeeds) + " seeds; median/SE:";
  for (const auto& s : strategies) {
    detail += " " + s + "=" + fmt(med[s]) + "/" + fmt(se[s], 3);
    if (s != "random" && med[s] > med["random"]) {
      pass = false;
      detail += "(median>random)";
    }
    if ((s == "eubo" || s == "duel_ucb") && se[s] > median_se) {
      pass = false;
      detail += "(SE>median SE)";
    }
  }
  return {pass, detail + "; median SE " + fmt(median_se, 3)};
}

// ---------------------------------------------------------------------------

// Synthetic duels: random-pairing runs judged by the weighted cost on the
// noiseless plant, so the generating cost is a function of the parameters.
Outcome datadriven_cost() {
  constexpr std::uint64_t kSeeds = 5;
  const cost::CostWeights w = cost::CostWeights::expert();
  std::vector<loop::RunRecord> sources;
  std::vector<cost::Duel> duels;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    loop::RunConfig c;
    c.strategy = "random";
    c.seed = seed;
    c.plant = c.plant.noiseless();
    c.oracle = loop::OracleSpec{w, 0.0};
    sources.push_back(loop::run_pbo(c));
    const auto d = sources.back().duels();
    duels.insert(duels.end(), d.begin(), d.end());
  }
  const Box box = sources.front().config.bounds;
  const sim::PlantConfig plant = sources.front().config.plant;
  const loop::FrozenCostModel frozen = loop::extract_datadriven_cost(duels, box);

  // Held-out points.
  Rng rng = make_stream(123, "heldout");
  Eigen::VectorXd truth(50), learned(50);
  for (int i = 0; i < 50; ++i) {
    Eigen::VectorXd u(4);
    for (int k = 0; k < 4; ++k) u[k] = uniform01(rng);
    const sim::ControlParams p = sim::ControlParams::from_vector(box.from_unit(u));
    truth[i] = cost::weighted_cost(cost::cost_terms(sim::run_trial(p, plant, 1000 + i), plant), w);
    learned[i] = frozen.cost(p);
  }
  const double rho = loop::spearman(truth, learned);

  double source_best = std::numeric_limits<double>::infinity();
  for (const auto& r : sources) {
    for (const auto& e : r.entries) {
      source_best = std::min(source_best, frozen.cost(e.first.params));
      if (e.second) source_best = std::min(source_best, frozen.cost(e.second->params));
    }
  }
  std::vector<double> bo_best;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    loop::RunConfig c;
    c.strategy = "vanilla_ei";
    c.seed = seed;
    c.plant = plant;
    const loop::RunRecord r =
        loop::run_vanilla_bo(c, [&](const sim::Trajectory& t) { return frozen.cost(t.params); });
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : r.entries) best = std::min(best, *e.observed_cost);
    bo_best.push_back(best);
  }
  const double bo_median = median(bo_best);
  return {rho > 0.7 && bo_median <= source_best,
          "Spearman " + fmt(rho) + " (> 0.7) from " + std::to_string(duels.size()) + " duels; BO median best frozen cost " +
              fmt(bo_median) + " vs best among source runs " + fmt(source_best)};
}

// ---------------------------------------------------------------------------

Outcome agreement_exact() {
  const sim::PlantConfig plant;
  const cost::CostWeights w = cost::CostWeights::expert();
  const Box box = sim::default_param_box();
  Rng draw = make_stream(5, "agreement");
  auto random_trial = [&](std::uint64_t seed) {
    Eigen::VectorXd u(4);
    for (int k = 0; k < 4; ++k) u[k] = uniform01(draw);
    return sim::run_trial(sim::ControlParams::from_vector(box.from_unit(u)), plant, seed);
  };

  std::vector<std::pair<cost::CostTerms, cost::CostTerms>> pairs;
  std::vector<double> gaps;
  for (int i = 0; i < 1000; ++i) {
    const sim::Trajectory a = random_trial(2 * i), b = random_trial(2 * i + 1);
    pairs.emplace_back(cost::cost_terms(a, plant), cost::cost_terms(b, plant));
    gaps.push_back(std::abs(cost::weighted_cost(pairs.back().first, w) - cost::weighted_cost(pairs.back().second, w)));
  }
  const double sigma = median(gaps);

  auto total_fraction = [&](const std::vector<loop::JudgedDuel>& duels) {
    double agree = 0.0;
    int count = 0;
    for (const auto& row : loop::agreement_analysis(duels, w)) {
      if (row.lens != "total") continue;
      agree += row.fraction * row.count;
      count += row.count;
    }
    return agree / count;
  };

  Rng noise = make_stream(5, "decisions");
  std::vector<loop::JudgedDuel> oracle, anti, noisy;
  double expected = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [a, b] = pairs[i];
    const double ca = cost::weighted_cost(a, w), cb = cost::weighted_cost(b, w);
    const int it = static_cast<int>(i % 15);
    const std::string label = "pair " + std::to_string(i);
    const bool a_wins = ca <= cb;
    oracle.push_back({it, label, a_wins ? a : b, a_wins ? b : a});
    anti.push_back({it, label, a_wins ? b : a, a_wins ? a : b});
    const bool a_noisy = ca + sigma * standard_normal(noise) <= cb + sigma * standard_normal(noise);
    noisy.push_back({it, label, a_noisy ? a : b, a_noisy ? b : a});
    expected += normal_cdf(gaps[i] / (std::numbers::sqrt2 * sigma));
  }
  expected /= static_cast<double>(pairs.size());
  const double fo = total_fraction(oracle), fa = total_fraction(anti), fn = total_fraction(noisy);
  return {fo == 1.0 && fa == 0.0 && std::abs(fn - expected) <= 0.05,
          "oracle " + fmt(fo) + ", anti-oracle " + fmt(fa) + ", noisy " + fmt(fn) + " vs Phi " + fmt(expected) +
              " (+-0.05, sigma_d " + fmt(sigma) + ", 1000 duels)"};
}

// ---------------------------------------------------------------------------

Outcome simulator_fixture() {
  const sim::PlantConfig plant = sim::PlantConfig{}.noiseless();
  const sim::Trajectory slow = sim::run_trial({4.0, 1.0, 0.31, 0.1}, plant, 0);
  const sim::Trajectory tuned = sim::run_trial({1.0, 3.45, 0.14, 2.0}, plant, 0);
  return {slow.duration() > tuned.duration() && tuned.status == sim::TrialStatus::GoalReached,
          "durations " + fmt(slow.duration()) + "s > " + fmt(tuned.duration()) + "s, tuned status " +
              sim::to_string(tuned.status)};
}

// ---------------------------------------------------------------------------

Outcome determinism() {
  std::vector<std::string> broken;
  for (const auto id : {acq::kEubo, acq::kDuelUcb, acq::kDuelThompson, acq::kEiig, acq::kHbEi, acq::kHbUcb, acq::kMuc,
                        acq::kRandom}) {
    loop::RunConfig c;
    c.strategy = std::string(id);
    c.n_initial = 4;
    c.n_iterations = 6;
    c.seed = 31;
    c.oracle = loop::OracleSpec{cost::CostWeights::expert(), 0.5};
    if (loop::record_to_json(loop::run_pbo(c)).dump() != loop::record_to_json(loop::run_pbo(c)).dump())
      broken.push_back(c.strategy);
  }
  for (const auto id : {acq::kVanillaEi, acq::kVanillaUcb}) {
    loop::RunConfig c;
    c.strategy = std::string(id);
    c.n_initial = 4;
    c.n_iterations = 6;
    c.seed = 31;
    const cost::CostWeights w = cost::CostWeights::expert();
    auto f = [&](const sim::Trajectory& t) { return cost::weighted_cost(cost::cost_terms(t, c.plant), w); };
    if (loop::record_to_json(loop::run_vanilla_bo(c, f)).dump() != loop::record_to_json(loop::run_vanilla_bo(c, f)).dump())
      broken.push_back(c.strategy);
  }

  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("pbo_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  std::string live, replayed, looped;
  {
    service::SessionStore store(dir);
    const std::string id = store.create({{"seed", 21}, {"strategy", "eiig"}})["id"];
    for (int i = 1; i <= 6; ++i) store.choose(id, i, i % 3 ? "first" : "second");
    const json archive = store.export_session(id);
    live = archive.dump();
    loop::PboLoop replay(archive["config"].get<loop::RunConfig>());
    for (const auto& ch : archive["choices"]) replay.resolve(ch["winner"] == "first");
    looped = loop::record_to_json(replay.record()).dump();
    service::SessionStore reopened(dir);
    replayed = reopened.export_session(id).dump();
    if (looped != archive["record"].dump()) broken.push_back("session replay through the loop");
  }
  fs::remove_all(dir);
  if (live != replayed) broken.push_back("session reload");

  std::string detail = "10 strategies run twice, session reload and loop replay compared byte for byte";
  if (!broken.empty()) {
    detail = "differs:";
    for (const auto& b : broken) detail += " " + b;
  }
  return {broken.empty(), detail};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"cost_formulas", 1.0, cost_formulas},
      {"likelihood_posterior", 10.0, likelihood_posterior},
      {"eubo_closed_form", 30.0, eubo_closed_form},
      {"protocol_fidelity", 240.0, protocol_fidelity},
      {"benchmark_property", 1800.0, benchmark_property},
      {"datadriven_cost", 900.0, datadriven_cost},
      {"agreement_exact", 60.0, agreement_exact},
      {"simulator_fixture", 5.0, simulator_fixture},
      {"determinism", 600.0, determinism},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<std::string> selected;
  bool list = false;
  app.add_option("--criterion", selected, "Run only these criteria");
  app.add_flag("--list", list, "Print criterion names");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& c : criteria()) std::cout << c.name << '\n';
    return 0;
  }
  for (const auto& name : selected) {
    if (std::none_of(criteria().begin(), criteria().end(), [&](const Criterion& c) { return c.name == name; })) {
      std::cerr << "unknown criterion " << name << '\n';
      return 2;
    }
  }

  int failed = 0;
  for (const auto& c : criteria()) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.name) == selected.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= c.max_seconds) {
      o.pass = false;
      o.detail += "; over the " + fmt(c.max_seconds) + "s budget";
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << " (" << fmt(secs, 3) << "s): " << o.detail << std::endl;
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
