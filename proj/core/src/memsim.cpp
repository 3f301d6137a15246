#include "tiersim/memsim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tiersim/errors.hpp"
#include "tiersim/rng.hpp"

namespace tiersim {

namespace {

const SimConfig& validated(const SimConfig& sim) {
  if (sim.epoch_events == 0) throw InvalidSpec("epoch_events must be positive");
  if (sim.fast.peak_bytes_per_epoch == 0 || sim.slow.peak_bytes_per_epoch == 0) {
    throw InvalidSpec("tier peak bandwidth must be positive");
  }
  if (sim.demote_watermark < 0.0 || sim.demote_watermark > 1.0) {
    throw InvalidSpec("demote_watermark must be in [0, 1]");
  }
  if (sim.latency_slope < 0.0) throw InvalidSpec("latency_slope must be >= 0");
  if (sim.contention_write_fraction < 0.0 || sim.contention_write_fraction > 1.0) {
    throw InvalidSpec("contention_write_fraction must be in [0, 1]");
  }
  return sim;
}

}  // namespace

MemoryState::MemoryState(const SimConfig& sim, const PolicyConfig& policy)
    : sim_(validated(sim)),
      policy_(policy),
      fast_{BuddyAllocator(sim.fast.frames), sim.fast},
      slow_{BuddyAllocator(sim.slow.frames), sim.slow},
      sampler_(policy.sample_prob, policy.rng_seed),
      traffic_(sim.traffic_window_buckets),
      tlb_(static_cast<std::size_t>(policy.tlb_entries)) {
  if (policy.duplex_mode == DuplexMode::FullDuplex) {
    sketch_ = std::make_unique<DualBcbf>(4096, 4, mix64(policy.rng_seed ^ 0xbcbfULL));
  }
  split_active_ = static_cast<double>(sim_.contention_bytes_per_epoch) >=
                  policy_.contention_gate *
                      static_cast<double>(sim_.slow.peak_bytes_per_epoch);
}

void MemoryState::map_region(Address base, std::uint64_t bytes) {
  if (bytes == 0 || bytes % kThpBytes != 0 || base % kThpBytes != 0) {
    throw InvalidSpec("mapped region must be a 2 MB-aligned multiple of 2 MB");
  }
  auto it = folios_.lower_bound(base);
  if (it != folios_.end() && it->first < base + bytes) {
    throw InvalidSpec("mapped regions overlap");
  }
  if (it != folios_.begin()) {
    --it;
    if (it->second.owner_vaddr + it->second.bytes() > base) {
      throw InvalidSpec("mapped regions overlap");
    }
  }
  for (Address v = base; v < base + bytes; v += kThpBytes) {
    auto frame = slow_.buddy.alloc(kOrder2M);
    if (!frame) throw ConfigError("slow tier too small for the mapped region");
    Folio f;
    f.id = next_folio_id_++;
    f.base_frame = *frame;
    f.order = kOrder2M;
    f.tier = TierId::Slow;
    f.owner_vaddr = v;
    folios_.emplace(v, f);
  }
}

void MemoryState::checkerboard_fast(double chunk_fraction, int hole_order) {
  if (chunk_fraction < 0.0 || chunk_fraction > 1.0) {
    throw InvalidSpec("checkerboard fraction must be in [0, 1]");
  }
  if (!valid_folio_order(hole_order) || hole_order >= kOrder2M) {
    throw InvalidSpec("checkerboard hole order must be below 2 MB");
  }
  const std::uint64_t chunks = fast_.buddy.frame_count() / 512;
  const auto cb_chunks = static_cast<std::uint64_t>(
      std::llround(chunk_fraction * static_cast<double>(chunks)));
  const std::uint64_t step = 1ull << hole_order;
  const std::uint64_t blocks = cb_chunks * (512 >> hole_order);
  // Lowest-first allocation carves the range in address order; freeing the
  // odd-numbered blocks then leaves no coalescable pairs behind.
  for (std::uint64_t b = 0; b < blocks; ++b) {
    auto got = fast_.buddy.alloc(hole_order);
    if (!got || *got != b * step) {
      throw Error("checkerboard carving went off the rails");
    }
  }
  for (std::uint64_t b = 1; b < blocks; b += 2) {
    fast_.buddy.free(b * step, hole_order);
  }
}

const Folio& MemoryState::folio_at(Address vaddr) const {
  return const_cast<MemoryState*>(this)->folio_ref(vaddr);
}

Folio& MemoryState::folio_ref(Address vaddr) {
  auto it = folios_.upper_bound(vaddr);
  if (it != folios_.begin()) {
    --it;
    Folio& f = it->second;
    if (vaddr >= f.owner_vaddr && vaddr < f.owner_vaddr + f.bytes()) return f;
  }
  throw UnmappedAddress("no folio maps address " + std::to_string(vaddr));
}

double MemoryState::cost_of_access(const Tier& t) const {
  double util = static_cast<double>(t.consumed) /
                static_cast<double>(t.cfg.peak_bytes_per_epoch);
  util = std::clamp(util, 0.0, 2.0);
  return t.cfg.base_latency * (1.0 + sim_.latency_slope * util);
}

double MemoryState::access(const AccessEvent& ev) {
  ++tick_;
  Folio* f = &folio_ref(ev.vaddr);
  if (f->tier == TierId::Slow && f->fault_armed) {
    f->fault_armed = false;
    hint_fault(f->owner_vaddr, ev.vaddr);
    f = &folio_ref(ev.vaddr);  // the fault may have split or moved it
  }
  f->last_touch = tick_;
  tlb_.access(f->id);

  Tier& t = tier(f->tier);
  const double cost = cost_of_access(t);
  t.consumed += sim_.access_bytes;
  if (f->tier == TierId::Slow) {
    traffic_.add(ev.is_write ? 0 : sim_.access_bytes,
                 ev.is_write ? sim_.access_bytes : 0);
  }
  if (sampler_.sample(ev)) {
    histogram_.record(ev.vaddr);
    if (sketch_) sketch_->record(ev.vaddr, ev.is_write);
  }
  report_.latency_proxy_total += cost;

  if (sim_.scan_interval > 0 && tick_ % sim_.scan_interval == 0) {
    arm_slow_folios(sim_.scan_batch);
  }
  return cost;
}

void MemoryState::arm_slow_folios(int budget) {
  if (folios_.empty() || budget <= 0) return;
  auto it = folios_.lower_bound(scan_cursor_);
  std::size_t visited = 0;
  const std::size_t n = folios_.size();
  while (visited < n && budget > 0) {
    if (it == folios_.end()) it = folios_.begin();
    Folio& f = it->second;
    if (f.tier == TierId::Slow && !f.fault_armed) {
      f.fault_armed = true;
      --budget;
    }
    ++it;
    ++visited;
  }
  scan_cursor_ = it == folios_.end() ? 0 : it->first;
}

bool MemoryState::promote(Address folio_vaddr) {
  Folio& f = folio_ref(folio_vaddr);
  auto dst = fast_.buddy.alloc(f.order);
  if (!dst) {
    ++report_.promote_fail;
    report_.promote_fail_pages += order_subpages(f.order);
    return false;
  }
  const std::uint64_t size = f.bytes();
  slow_.buddy.free(f.base_frame, f.order);
  f.base_frame = *dst;
  f.tier = TierId::Fast;
  f.last_touch = tick_;
  f.fault_armed = false;
  ++report_.promote_success;
  report_.promote_success_pages += order_subpages(f.order);
  report_.bytes_migrated += size;
  slow_.consumed += size;  // read side of the copy
  fast_.consumed += size;  // write side
  traffic_.add(size, 0);
  return true;
}

void MemoryState::demote(Folio& f) {
  auto dst = slow_.buddy.alloc(f.order);
  if (!dst) throw SlowTierFull("slow tier cannot take a demoted folio");
  const std::uint64_t size = f.bytes();
  fast_.buddy.free(f.base_frame, f.order);
  f.base_frame = *dst;
  f.tier = TierId::Slow;
  f.fault_armed = false;
  ++report_.demotions;
  report_.demotion_pages += order_subpages(f.order);
  report_.bytes_migrated += size;
  fast_.consumed += size;
  slow_.consumed += size;
  traffic_.add(0, size);
}

std::uint64_t MemoryState::demote_if_pressured(double watermark) {
  std::uint64_t demoted = 0;
  while (fast_.buddy.used_fraction() > watermark) {
    Folio* victim = nullptr;
    for (auto& [vaddr, f] : folios_) {
      if (f.tier != TierId::Fast) continue;
      if (!victim || f.last_touch < victim->last_touch ||
          (f.last_touch == victim->last_touch && f.id < victim->id)) {
        victim = &f;
      }
    }
    if (!victim) break;  // only unreclaimable reservations remain
    demote(*victim);
    ++demoted;
  }
  return demoted;
}

void MemoryState::split_folio(Address folio_vaddr, int child_order) {
  const Folio parent = folio_ref(folio_vaddr);
  folios_.erase(parent.owner_vaddr);
  tlb_.invalidate(parent.id);
  slow_.buddy.split_allocated(parent.base_frame, parent.order, child_order);
  const int pieces = 1 << (parent.order - child_order);
  for (int w = 0; w < pieces; ++w) {
    Folio child;
    child.id = next_folio_id_++;
    child.base_frame = parent.base_frame +
                       static_cast<std::uint64_t>(w) * (1ull << child_order);
    child.order = child_order;
    child.tier = parent.tier;
    child.owner_vaddr = parent.owner_vaddr +
                        static_cast<std::uint64_t>(w) * order_bytes(child_order);
    child.last_touch = parent.last_touch;
    folios_.emplace(child.owner_vaddr, child);
  }
}

void MemoryState::hint_fault(Address folio_vaddr, Address fault_vaddr) {
  const Folio snapshot = folio_ref(folio_vaddr);
  if (snapshot.tier != TierId::Slow) return;
  const FaultContext ctx{snapshot, fault_vaddr,
                         static_cast<int>(subpage_index(fault_vaddr))};

  // Hook 3 runs first: only admitted pages reach the splitting pipeline.
  AdmissionResult adm;
  if (hooks_.migrate_admission) adm = hooks_.migrate_admission(ctx);
  if (adm.verdict == Verdict::Prevent) {
    if (adm.page_class == RwClass::ReadHeavy) {
      ++report_.admit_prevented_read_heavy;
    } else {
      ++report_.admit_prevented_write_heavy;
    }
    log_prevented(snapshot, fault_vaddr, adm.page_class);
    return;
  }
  ++report_.admit_allowed;

  // Splitting gate: stay at 2 MB unless slow-tier bandwidth is contended
  // and a split policy is attached. Already-split folios migrate whole.
  int order = kOrder2M;
  if (split_active_ && hooks_.pick_split_order && snapshot.order == kOrder2M) {
    order = hooks_.pick_split_order(ctx);
  }
  if (order >= snapshot.order) {
    const bool ok = promote(folio_vaddr);
    log_whole(snapshot, fault_vaddr, ok);
    return;
  }

  split_folio(folio_vaddr, order);
  if (order == kOrder4K) {
    ++report_.splits_order0;
  } else {
    ++report_.splits_by_order[order - 4];
  }

  const int len = order_subpages(order);
  const int windows = kSubpagesPerThp / len;
  const int fault_window = ctx.fault_subpage / len;
  std::vector<int> targets;
  int promoted = 0;
  int failed = 0;
  std::uint64_t bytes = 0;
  for (int w = 0; w < windows; ++w) {
    const bool cold =
        hooks_.subpage_is_cold ? hooks_.subpage_is_cold(ctx, w, order) : false;
    ++report_.split_windows_total;
    if (!cold) ++report_.split_windows_hot;
    if (cold && w != fault_window) continue;
    targets.push_back(w);
    const Address child =
        snapshot.owner_vaddr + static_cast<std::uint64_t>(w) * order_bytes(order);
    if (promote(child)) {
      ++promoted;
      bytes += order_bytes(order);
    } else {
      ++failed;
    }
  }
  log_split(snapshot, fault_vaddr, order, targets, promoted, failed, bytes);
}

void MemoryState::begin_epoch() {
  fast_.consumed = 0;
  slow_.consumed = 0;
  if (sim_.contention_bytes_per_epoch > 0) {
    slow_.consumed += sim_.contention_bytes_per_epoch;
    const auto writes = static_cast<std::uint64_t>(
        std::llround(sim_.contention_write_fraction *
                     static_cast<double>(sim_.contention_bytes_per_epoch)));
    traffic_.add(sim_.contention_bytes_per_epoch - writes, writes);
  }
}

void MemoryState::end_epoch() {
  ++epochs_;
  if (sim_.decay_interval_epochs > 0 &&
      epochs_ % static_cast<std::uint64_t>(sim_.decay_interval_epochs) == 0) {
    histogram_.decay(1);
    if (sketch_) sketch_->decay();
  }
  demote_if_pressured(sim_.demote_watermark);
  traffic_.rotate();
}

void MemoryState::finalize(std::uint64_t events) {
  report_.events = events;
  report_.tlb_hits = tlb_.hits();
  report_.tlb_misses = tlb_.misses();
  report_.tlb_misses_per_1k =
      events ? static_cast<double>(tlb_.misses()) * 1000.0 /
                   static_cast<double>(events)
             : 0.0;
  report_.throughput_proxy =
      report_.latency_proxy_total > 0.0
          ? static_cast<double>(events) / report_.latency_proxy_total
          : 0.0;
  report_.hot_subfolio_fraction =
      report_.split_windows_total
          ? static_cast<double>(report_.split_windows_hot) /
                static_cast<double>(report_.split_windows_total)
          : 0.0;
}

RunReport MemoryState::run_trace(std::span<const AccessEvent> events) {
  std::size_t i = 0;
  while (i < events.size()) {
    begin_epoch();
    const std::size_t end =
        std::min(i + static_cast<std::size_t>(sim_.epoch_events), events.size());
    for (; i < end; ++i) access(events[i]);
    end_epoch();
  }
  finalize(events.size());
  return report_;
}

namespace {

void log_prefix(std::ostream& out, std::uint64_t tick, const Folio& folio,
                Address vaddr) {
  out << "{\"tick\":" << tick << ",\"vaddr\":" << vaddr
      << ",\"folio_vaddr\":" << folio.owner_vaddr;
}

}  // namespace

void MemoryState::log_prevented(const Folio& folio, Address vaddr, RwClass cls) {
  if (!event_log_) return;
  log_prefix(*event_log_, tick_, folio, vaddr);
  *event_log_ << ",\"verdict\":\"prevent\",\"page_class\":\"" << to_string(cls)
              << "\",\"action\":\"deferred\",\"promoted\":0,\"failed\":0,\"bytes\":0}\n";
}

void MemoryState::log_whole(const Folio& folio, Address vaddr, bool ok) {
  if (!event_log_) return;
  log_prefix(*event_log_, tick_, folio, vaddr);
  *event_log_ << ",\"verdict\":\"allow\",\"action\":\"whole\",\"order\":"
              << folio.order << ",\"promoted\":" << (ok ? 1 : 0)
              << ",\"failed\":" << (ok ? 0 : 1)
              << ",\"bytes\":" << (ok ? folio.bytes() : 0) << "}\n";
}

void MemoryState::log_split(const Folio& folio, Address vaddr, int order,
                            const std::vector<int>& targets, int promoted,
                            int failed, std::uint64_t bytes) {
  if (!event_log_) return;
  log_prefix(*event_log_, tick_, folio, vaddr);
  *event_log_ << ",\"verdict\":\"allow\",\"action\":\"split\",\"order\":" << order
              << ",\"targets\":[";
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (i) *event_log_ << ',';
    *event_log_ << targets[i];
  }
  *event_log_ << "],\"promoted\":" << promoted << ",\"failed\":" << failed
              << ",\"bytes\":" << bytes << "}\n";
}

}  // namespace tiersim
