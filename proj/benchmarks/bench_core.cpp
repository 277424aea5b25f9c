#include <benchmark/benchmark.h>

#include "pbo/acquisition/strategies.hpp"
#include "pbo/gp/hyper_search.hpp"
#include "pbo/gp/preference_model.hpp"
#include "pbo/loop/pbo_loop.hpp"
#include "pbo/sim/trial.hpp"

using namespace pbo;

namespace {

// Duels on the 4-D unit box decided by a smooth utility.
gp::DuelSet random_duels(int n, std::uint64_t seed) {
  Rng rng(seed);
  gp::DuelSet d(4);
  auto utility = [](const Eigen::Vector4d& x) { return -(x - Eigen::Vector4d(0.3, 0.7, 0.2, 0.6)).squaredNorm(); };
  for (int i = 0; i < n; ++i) {
    Eigen::Vector4d a, b;
    for (int k = 0; k < 4; ++k) {
      a[k] = uniform01(rng);
      b[k] = uniform01(rng);
    }
    if (utility(a) >= utility(b)) d.add_duel(a, b);
    else d.add_duel(b, a);
  }
  return d;
}

gp::KernelHyper default_hyper() {
  gp::KernelHyper h = gp::KernelHyper::defaults(4, 0.5);
  h.noise_std = 0.1;
  return h;
}

}  // namespace

static void BM_Trial(benchmark::State& state) {
  const sim::PlantConfig plant;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sim::run_trial({1.0, 3.45, 0.14, 2.0}, plant, seed++));
}
BENCHMARK(BM_Trial);

static void BM_FitLaplace(benchmark::State& state) {
  const gp::DuelSet d = random_duels(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(gp::fit_laplace(d, default_hyper()));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FitLaplace)->RangeMultiplier(2)->Range(8, 128)->Complexity();

static void BM_HyperSearch(benchmark::State& state) {
  const gp::DuelSet d = random_duels(27, 2);
  for (auto _ : state) {
    Rng rng(3);
    benchmark::DoNotOptimize(gp::optimize_hyperparameters(d, default_hyper(), rng));
  }
}
BENCHMARK(BM_HyperSearch)->Unit(benchmark::kMillisecond);

static void BM_Propose(benchmark::State& state, std::string_view strategy) {
  const gp::PreferenceModel m = gp::fit_laplace(random_duels(27, 4), default_hyper());
  for (auto _ : state) {
    Rng rng(5);
    benchmark::DoNotOptimize(acq::propose(strategy, m, rng));
  }
}
BENCHMARK_CAPTURE(BM_Propose, eubo, acq::kEubo)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Propose, duel_ucb, acq::kDuelUcb)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Propose, duel_thompson, acq::kDuelThompson)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Propose, eiig, acq::kEiig)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Propose, hb_ei, acq::kHbEi)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Propose, muc, acq::kMuc)->Unit(benchmark::kMillisecond);

static void BM_SmallRun(benchmark::State& state) {
  loop::RunConfig c;
  c.n_initial = 4;
  c.n_iterations = 4;
  for (auto _ : state) benchmark::DoNotOptimize(loop::run_pbo(c));
}
BENCHMARK(BM_SmallRun)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
