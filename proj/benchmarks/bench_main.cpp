#include <benchmark/benchmark.h>

#include "stochalloc/experiment.hpp"
#include "stochalloc/gain_design.hpp"
#include "stochalloc/gillespie.hpp"
#include "stochalloc/master_equation.hpp"
#include "stochalloc/moment_dynamics.hpp"

namespace {

using namespace stochalloc;

RateParams example1_params(bool with_beta) {
  ExperimentConfig c = example1_config();
  if (!with_beta) c.beta.assign(4, 0.0);
  return resolve_model(c).params;
}

void BM_DesignExample1(benchmark::State& state) {
  const ExperimentConfig c = example1_config();
  const TaskGraph g = c.graph();
  const Eigen::VectorXd xd = c.desired_vector();
  for (auto _ : state) benchmark::DoNotOptimize(design_rates(g, xd, c.design));
}
BENCHMARK(BM_DesignExample1);

void BM_SsaRun(benchmark::State& state) {
  const RateParams p = example1_params(state.range(0) != 0);
  const PopulationState x0{{5, 15, 5, 5}};
  std::uint64_t seed = 1;
  std::size_t events = 0;
  for (auto _ : state) {
    const Trace t = ssa_run(p, x0, 20.0, seed++);
    events += t.events.size();
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SsaRun)->Arg(0)->Arg(1);

void BM_AgentRun(benchmark::State& state) {
  const RateParams p = example1_params(false);
  const PopulationState x0{{5, 15, 5, 5}};
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(agent_sim_run(p, x0, 20.0, 1e-3, seed++));
}
BENCHMARK(BM_AgentRun)->Unit(benchmark::kMillisecond);

void BM_IntegrateMoments(benchmark::State& state) {
  const RateParams p = example1_params(true);
  const Eigen::VectorXd m0 = (Eigen::VectorXd(4) << 5, 15, 5, 5).finished();
  for (auto _ : state) benchmark::DoNotOptimize(integrate_moments(p, m0, 20.0, 1e-3, 1000));
}
BENCHMARK(BM_IntegrateMoments)->Unit(benchmark::kMillisecond);

void BM_SteadyStateCovariance(benchmark::State& state) {
  const RateParams p = example1_params(false);
  const Eigen::VectorXd xd = (Eigen::VectorXd(4) << 13, 9, 6, 2).finished();
  for (auto _ : state) benchmark::DoNotOptimize(steady_state_covariance(p, xd));
}
BENCHMARK(BM_SteadyStateCovariance);

void BM_CmeStationary(benchmark::State& state) {
  const RateParams p = example1_params(true);
  const int robots = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const MasterEquation cme(p, robots, 30000);
    benchmark::DoNotOptimize(cme.stationary());
  }
  state.counters["states"] = static_cast<double>(composition_count(robots, 4));
}
BENCHMARK(BM_CmeStationary)->Arg(10)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
