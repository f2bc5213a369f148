#include <benchmark/benchmark.h>

#include "ttu/netsim/scenarios.hpp"
#include "ttu/netsim/sim.hpp"
#include "ttu/oneclock.hpp"
#include "ttu/timebase.hpp"

using namespace ttu;
using namespace ttu::literals;

static void BM_FlowSwapRun(benchmark::State& state) {
  const auto kind = static_cast<netsim::StrategyKind>(state.range(0));
  const auto s = netsim::make_flow_swap_scenario(netsim::FlowSwapParams{}, kind);
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(netsim::run(s, seed++).metrics.dropped);
  state.SetLabel(std::string(netsim::to_string(kind)));
}
BENCHMARK(BM_FlowSwapRun)
    ->Arg(static_cast<int>(netsim::StrategyKind::TimedSimultaneous))
    ->Arg(static_cast<int>(netsim::StrategyKind::UntimedSequential))
    ->Unit(benchmark::kMillisecond);

static void BM_MultiPhaseRun(benchmark::State& state) {
  netsim::MultiPhaseParams p;
  p.detour_switches = static_cast<unsigned>(state.range(0));
  const auto s = netsim::make_multiphase_scenario(p, netsim::StrategyKind::TimedMultiPhase);
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(netsim::run(s, seed++).metrics.consistency_violations);
}
BENCHMARK(BM_MultiPhaseRun)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static oneclock::History filled_history(std::size_t n) {
  oneclock::History h(n);
  Rng rng = make_rng(5, 0);
  const DelayModel ete = delay::Contaminated{delay::Gaussian{50_ms, 1_ms}, 0.05, 500_ms};
  SimTime t{1'000'000'000};
  for (std::size_t i = 0; i < n; ++i) {
    const SimTime done = t + sample(ete, rng);
    h.record({t, t, done});
    t = done;
  }
  return h;
}

static void BM_Predict(benchmark::State& state) {
  const std::vector<oneclock::PredictorKind> kinds{oneclock::Naive{}, oneclock::Average{}, oneclock::FtAverage{},
                                                   oneclock::Kalman{}};
  const auto h = filled_history(1024);
  oneclock::Predictor p(kinds[static_cast<std::size_t>(state.range(0))]);
  for (auto _ : state) benchmark::DoNotOptimize(p.predict(h));
  state.SetLabel(p.name());
}
BENCHMARK(BM_Predict)->DenseRange(0, 3);

static void BM_RptpUpdate(benchmark::State& state) {
  ClockModel sw({3_ms, 20.0, 10'000.0, 1});
  ClockModel ctl;
  OffsetTable table;
  table.register_switch(1);
  SimTime t{1'000'000'000};
  for (auto _ : state) {
    benchmark::DoNotOptimize(table.update(rptp_exchange(1, sw, ctl, PathDelays{1_ms, 1_ms}, t)));
    t += 10_ms;
  }
}
BENCHMARK(BM_RptpUpdate);
