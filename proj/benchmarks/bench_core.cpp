#include <benchmark/benchmark.h>

#include "tiersim/buddy.hpp"
#include "tiersim/profiling.hpp"
#include "tiersim/rng.hpp"
#include "tiersim/rwsketch.hpp"
#include "tiersim/scenario.hpp"
#include "tiersim/split_policy.hpp"

using namespace tiersim;

static void BM_HistogramRecord(benchmark::State& state) {
  SubpageHistogram h;
  SplitMix64 rng(1);
  for (auto _ : state) {
    h.record(rng.next());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_HistogramRecord);

static void BM_CbfUpdate(benchmark::State& state) {
  BlockedCbf f(4096, 4, 2);
  SplitMix64 rng(2);
  for (auto _ : state) {
    f.update(rng.next_below(1 << 20) << 12);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CbfUpdate);

static void BM_CbfGet(benchmark::State& state) {
  BlockedCbf f(4096, 4, 3);
  SplitMix64 fill(3);
  for (int i = 0; i < 100000; ++i) f.update(fill.next_below(1 << 20) << 12);
  SplitMix64 rng(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.get(rng.next_below(1 << 20) << 12));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CbfGet);

static void BM_DecideSplit(benchmark::State& state) {
  SplitMix64 rng(5);
  HistogramSnapshot snap;
  for (int i = 0; i < 128; ++i) snap.counts[i] = 10 + rng.next_below(50);
  for (int i = 128; i < 512; ++i) snap.counts[i] = rng.next_below(3);
  for (const auto c : snap.counts) snap.total += c;
  PolicyConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(decide_split(snap, cfg, 17));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DecideSplit);

static void BM_BuddyAllocFree(benchmark::State& state) {
  BuddyAllocator buddy(1 << 16);
  SplitMix64 rng(6);
  for (auto _ : state) {
    const int order = static_cast<int>(4 + rng.next_below(6));
    if (auto f = buddy.alloc(order)) {
      buddy.free(*f, order);
    }
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BuddyAllocFree);

static void BM_RunScenario(benchmark::State& state) {
  Scenario s;
  s.policy = PolicyKind::TierBpf;
  s.policy_cfg.sample_prob = 0.05;
  s.policy_cfg.duplex_mode = DuplexMode::HalfDuplex;
  s.sim.fast.frames = 4096;
  s.sim.slow.frames = 32768;
  s.contention_pct = 100.0;
  s.trace_spec = TraceSpec{.kind = TraceKind::HotBlocks,
                           .n_events = static_cast<std::uint64_t>(state.range(0)),
                           .region_bytes = 32ull << 20,
                           .write_fraction = 0.1,
                           .seed = 9,
                           .block_bytes = 512 * 1024,
                           .hot_fraction = 1.0,
                           .hot_weight = 0.9};
  const auto events = scenario_trace(s);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_one(s, events));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunScenario)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
