#include <benchmark/benchmark.h>

#include "ttu/tcam.hpp"
#include "ttu/timeflip.hpp"

using namespace ttu;

static void BM_EncodeGeq(benchmark::State& state) {
  const auto k = static_cast<unsigned>(state.range(0));
  const std::uint64_t n = std::uint64_t{1} << k;
  std::uint64_t t0 = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(encode_geq(t0, k));
    t0 = (t0 * 6364136223846793005ull + 1442695040888963407ull) % n;
  }
}
BENCHMARK(BM_EncodeGeq)->Arg(8)->Arg(16)->Arg(32)->Arg(63);

static void BM_EncodeWindow(benchmark::State& state) {
  const auto k = static_cast<unsigned>(state.range(0));
  const std::uint64_t n = std::uint64_t{1} << k;
  for (auto _ : state) benchmark::DoNotOptimize(encode_window(1, n - 1, k));
}
BENCHMARK(BM_EncodeWindow)->Arg(8)->Arg(16)->Arg(32);

static void BM_ChooseGeq(benchmark::State& state) {
  const auto k = static_cast<unsigned>(state.range(0));
  const ScheduleTolerance tol{SimTime{1'000'003}, SimTime{1'000'003 + (std::uint64_t{1} << k)}};
  for (auto _ : state) benchmark::DoNotOptimize(choose_update_time(tol, k, Duration{1}, range_kind::Geq{}));
}
BENCHMARK(BM_ChooseGeq)->Arg(8)->Arg(16)->Arg(32);

static void BM_ChooseWindow(benchmark::State& state) {
  const auto k = static_cast<unsigned>(state.range(0));
  const std::uint64_t n = std::uint64_t{1} << k;
  const ScheduleTolerance tol{SimTime{17}, SimTime{17 + n}};
  for (auto _ : state)
    benchmark::DoNotOptimize(choose_update_time(tol, k, Duration{1}, range_kind::Window{n / 3}));
}
BENCHMARK(BM_ChooseWindow)->Arg(8)->Arg(12)->Arg(16);

static void BM_TcamLookup(benchmark::State& state) {
  constexpr unsigned kTs = 16;
  TcamTable table(8, kTs, 256);
  for (const auto& w : encode_geq(12'345, kTs)) table.add(2, TernaryWord::exact(7, 8), w, 2, 2);
  table.add(1, TernaryWord::exact(7, 8), TernaryWord(kTs), 1, 1);
  std::uint64_t ts = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(table.lookup(7, ts));
    ts = (ts + 977) & 0xffff;
  }
}
BENCHMARK(BM_TcamLookup);
