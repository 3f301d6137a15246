#include <sstream>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "tiersim/errors.hpp"
#include "tiersim/memsim.hpp"
#include "tiersim/policy_bindings.hpp"
#include "tiersim/scenario.hpp"

using namespace tiersim;

namespace {

SimConfig small_sim() {
  SimConfig sim;
  sim.fast.frames = 4096;   // 16 MB
  sim.slow.frames = 16384;  // 64 MB
  sim.fast.base_latency = 1.0;
  sim.slow.base_latency = 3.0;
  sim.scan_interval = 1 << 30;  // keep scanning out of targeted tests
  return sim;
}

PolicyConfig quiet_policy() {
  PolicyConfig cfg;
  cfg.sample_prob = 0.0;
  cfg.duplex_mode = DuplexMode::HalfDuplex;
  return cfg;
}

}  // namespace

TEST_CASE("access cost on an idle fast-tier folio is the base latency") {
  MemoryState ms(small_sim(), quiet_policy());
  ms.map_region(0, kThpBytes);
  ms.hint_fault(0, 0);  // default hooks promote the whole folio
  REQUIRE(ms.folio_at(0).tier == TierId::Fast);
  // run_trace opens a fresh epoch, so the promotion traffic above is gone
  // and the single access sees an idle system.
  const std::vector<AccessEvent> one{{0, 0x100, false}};
  const RunReport r = ms.run_trace(one);
  CHECK(r.latency_proxy_total == doctest::Approx(1.0));
}

TEST_CASE("slow access at saturated bandwidth costs twice the base") {
  SimConfig sim = small_sim();
  sim.contention_bytes_per_epoch = sim.slow.peak_bytes_per_epoch;
  PolicyConfig cfg = quiet_policy();
  cfg.contention_gate = 1.0;  // keep the splitting gate out of the picture
  Scenario s;
  s.policy = PolicyKind::NoSplit;
  s.policy_cfg = cfg;
  s.sim = sim;
  s.contention_pct = 100.0;
  s.trace_spec = TraceSpec{.kind = TraceKind::Uniform,
                           .n_events = 1,
                           .region_bytes = kThpBytes,
                           .seed = 1};
  const auto events = scenario_trace(s);
  const RunReport r = run_one(s, events);
  CHECK(r.latency_proxy_total == doctest::Approx(2.0 * sim.slow.base_latency));
}

TEST_CASE("TLB retains a folio between accesses") {
  MemoryState ms(small_sim(), quiet_policy());
  ms.map_region(0, kThpBytes);
  ms.access({0, 0, false});
  ms.access({1, 0x5000, false});  // same 2 MB folio
  CHECK(ms.report().events == 0);  // finalize not run yet
  ms.run_trace({});                // finalize counters
  CHECK(ms.report().tlb_misses == 1);
  CHECK(ms.report().tlb_hits == 1);
}

TEST_CASE("default hooks promote the whole THP when there is room") {
  MemoryState ms(small_sim(), quiet_policy());
  ms.map_region(0, kThpBytes);
  ms.hint_fault(0, 0x1000);
  const RunReport& r = ms.report();
  CHECK(r.promote_success == 1);
  CHECK(r.promote_fail == 0);
  CHECK(r.bytes_migrated == kThpBytes);
  CHECK(r.split_events_total() == 0);
  CHECK(ms.folio_at(0).tier == TierId::Fast);
}

TEST_CASE("tierbpf splits to the order the fragmentation still serves") {
  // Fast tier fragmented against order 9 but not order 7; the 128-hot
  // histogram picks 512 KB and that one target promotes cleanly.
  SimConfig sim = small_sim();
  sim.contention_bytes_per_epoch = sim.slow.peak_bytes_per_epoch;  // gate open
  PolicyConfig cfg;
  cfg.sample_prob = 1.0;
  cfg.duplex_mode = DuplexMode::HalfDuplex;
  MemoryState ms(sim, cfg);
  REQUIRE(ms.splitting_active());
  ms.map_region(0, 2 * kThpBytes);
  ms.checkerboard_fast(1.0, kOrder512K);
  REQUIRE(ms.fast_buddy().free_blocks(9) == 0);
  REQUIRE(ms.fast_buddy().free_blocks(7) > 0);

  // Build the 128-hot profile: subpages 0..127, ten hits each.
  for (int pass = 0; pass < 10; ++pass) {
    for (int sp = 0; sp < 128; ++sp) {
      ms.access({0, static_cast<Address>(sp) * kPageBytes, false});
    }
  }
  auto binding = attach_policy(PolicyKind::TierBpf, ms);
  ms.hint_fault(0, 0x1000);

  const RunReport& r = ms.report();
  CHECK(r.splits_at(7) == 1);
  CHECK(r.promote_success == 1);
  CHECK(r.promote_fail == 0);
  CHECK(r.bytes_migrated == order_bytes(kOrder512K));
  CHECK(ms.folio_at(0).tier == TierId::Fast);
  CHECK(ms.folio_at(0).order == kOrder512K);

  SUBCASE("children partition the parent region") {
    for (int w = 0; w < 4; ++w) {
      const Folio& child = ms.folio_at(static_cast<Address>(w) * order_bytes(7));
      CHECK(child.order == kOrder512K);
      CHECK(child.owner_vaddr == static_cast<Address>(w) * order_bytes(7));
      CHECK(child.tier == (w == 0 ? TierId::Fast : TierId::Slow));
    }
    // The second THP is untouched.
    CHECK(ms.folio_at(kThpBytes).order == kOrder2M);
    CHECK(ms.folio_count() == 5);
  }
}

TEST_CASE("prevented faults produce no splits and no migration") {
  SimConfig sim = small_sim();
  sim.contention_bytes_per_epoch = sim.slow.peak_bytes_per_epoch;
  PolicyConfig cfg = quiet_policy();
  MemoryState ms(sim, cfg);
  ms.map_region(0, kThpBytes);

  int pick_calls = 0;
  HookRegistry hooks;
  hooks.migrate_admission = [](const FaultContext&) {
    return AdmissionResult{Verdict::Prevent, RwClass::WriteHeavy};
  };
  hooks.pick_split_order = [&](const FaultContext&) {
    ++pick_calls;
    return kOrder64K;
  };
  ms.set_hooks(std::move(hooks));

  std::ostringstream log;
  ms.set_event_log(&log);
  ms.hint_fault(0, 0);

  const RunReport& r = ms.report();
  CHECK(pick_calls == 0);  // admission runs before the splitting stage
  CHECK(r.admit_prevented_write_heavy == 1);
  CHECK(r.admit_allowed == 0);
  CHECK(r.split_events_total() == 0);
  CHECK(r.bytes_migrated == 0);
  CHECK(ms.folio_at(0).tier == TierId::Slow);

  const auto line = nlohmann::json::parse(log.str());
  CHECK(line.at("verdict") == "prevent");
  CHECK(line.at("bytes") == 0);
  CHECK(!line.contains("targets"));
}

TEST_CASE("demotion under pressure evicts the oldest folios") {
  SimConfig sim = small_sim();
  sim.fast.frames = 16 * 512;
  sim.slow.frames = 64 * 512;
  MemoryState ms(sim, quiet_policy());
  ms.map_region(0, 16 * kThpBytes);
  for (int k = 0; k < 16; ++k) {
    ms.hint_fault(static_cast<Address>(k) * kThpBytes,
                  static_cast<Address>(k) * kThpBytes);
  }
  REQUIRE(ms.report().promote_success == 16);
  REQUIRE(ms.fast_buddy().used_fraction() == doctest::Approx(1.0));

  SUBCASE("watermark above usage demotes nothing") {
    // 100% used; a watermark of 1.0 is not exceeded.
    CHECK(ms.demote_if_pressured(1.0) == 0);
  }
  SUBCASE("watermark 0.5 demotes the 8 least recently touched") {
    for (int k = 0; k < 16; ++k) {
      ms.access({0, static_cast<Address>(k) * kThpBytes, false});
    }
    CHECK(ms.demote_if_pressured(0.5) == 8);
    CHECK(ms.report().demotions == 8);
    for (int k = 0; k < 16; ++k) {
      CHECK(ms.folio_at(static_cast<Address>(k) * kThpBytes).tier ==
            (k < 8 ? TierId::Slow : TierId::Fast));
    }
  }
}

TEST_CASE("demotion into a full slow tier errors") {
  SimConfig sim = small_sim();
  sim.fast.frames = 2 * 512;
  sim.slow.frames = 2 * 512;
  MemoryState ms(sim, quiet_policy());
  ms.map_region(0, 2 * kThpBytes);        // slow is now full
  ms.hint_fault(0, 0);                    // promote THP0, slow has one hole
  ms.map_region(2 * kThpBytes, kThpBytes);  // plug the hole
  CHECK_THROWS_AS(ms.demote_if_pressured(0.0), SlowTierFull);
}

TEST_CASE("empty trace reports all-zero counters") {
  MemoryState ms(small_sim(), quiet_policy());
  ms.map_region(0, kThpBytes);
  const RunReport r = ms.run_trace({});
  CHECK(r.events == 0);
  CHECK(r.promote_success == 0);
  CHECK(r.promote_fail == 0);
  CHECK(r.demotions == 0);
  CHECK(r.bytes_migrated == 0);
  CHECK(r.latency_proxy_total == 0.0);
  CHECK(r.throughput_proxy == 0.0);
}

TEST_CASE("unmapped access throws") {
  MemoryState ms(small_sim(), quiet_policy());
  ms.map_region(0, kThpBytes);
  CHECK_THROWS_AS(ms.access({0, 4 * kThpBytes, false}), UnmappedAddress);
}

namespace {

Scenario hotblocks_scenario(PolicyKind policy, double contention_pct) {
  Scenario s;
  s.name = "memsim_test";
  s.policy = policy;
  s.policy_cfg.sample_prob = 0.05;
  s.policy_cfg.duplex_mode = DuplexMode::HalfDuplex;
  s.sim.fast.frames = 4096;
  s.sim.slow.frames = 32768;
  s.contention_pct = contention_pct;
  s.trace_spec = TraceSpec{.kind = TraceKind::HotBlocks,
                           .n_events = 60000,
                           .region_bytes = 32 * kThpBytes,
                           .write_fraction = 0.1,
                           .seed = 9,
                           .block_bytes = 512 * 1024,
                           .hot_fraction = 1.0,
                           .hot_weight = 0.9};
  return s;
}

}  // namespace

TEST_CASE("scenario runs are deterministic") {
  const Scenario s = hotblocks_scenario(PolicyKind::TierBpf, 100.0);
  const auto events = scenario_trace(s);
  SweepRow a{s.name, s.policy, s.contention_pct, s.policy_cfg.rng_seed,
             run_one(s, events)};
  SweepRow b{s.name, s.policy, s.contention_pct, s.policy_cfg.rng_seed,
             run_one(s, events)};
  CHECK(report_json(a) == report_json(b));
  CHECK(a.report.promote_success > 0);
}

TEST_CASE("splitting gate: no contention means no splits") {
  const Scenario s = hotblocks_scenario(PolicyKind::TierBpf, 0.0);
  const auto events = scenario_trace(s);
  const RunReport r = run_one(s, events);
  CHECK(r.split_events_total() == 0);
}

TEST_CASE("bandwidth accounting ties bytes to page-granularity counters") {
  const Scenario s = hotblocks_scenario(PolicyKind::TierBpf, 100.0);
  const auto events = scenario_trace(s);
  const RunReport r = run_one(s, events);
  CHECK(r.bytes_migrated ==
        (r.promote_success_pages + r.demotion_pages) * kPageBytes);
}

TEST_CASE("split event log lines always include the fault window") {
  const Scenario s = hotblocks_scenario(PolicyKind::TierBpf, 100.0);
  const auto events = scenario_trace(s);
  std::ostringstream log;
  const RunReport r = run_one(s, events, &log);
  REQUIRE(r.split_events_total() > 0);
  std::istringstream in(log.str());
  std::string line;
  int split_lines = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    if (j.at("action") != "split") continue;
    ++split_lines;
    const int order = j.at("order").get<int>();
    const auto targets = j.at("targets").get<std::vector<int>>();
    REQUIRE(!targets.empty());
    const auto fault_window = static_cast<int>(
        subpage_index(j.at("vaddr").get<Address>()) >> order);
    bool found = false;
    for (int w : targets) found = found || w == fault_window;
    CHECK(found);
  }
  CHECK(split_lines == static_cast<int>(r.split_events_total()));
}
