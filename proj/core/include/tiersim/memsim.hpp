#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "tiersim/admission.hpp"
#include "tiersim/buddy.hpp"
#include "tiersim/config.hpp"
#include "tiersim/profiling.hpp"
#include "tiersim/rwsketch.hpp"
#include "tiersim/tlb.hpp"
#include "tiersim/types.hpp"

namespace tiersim {

struct TierConfig {
  std::uint64_t frames = 0;
  std::uint64_t peak_bytes_per_epoch = 8ull << 20;
  double base_latency = 1.0;
};

/// Mechanism knobs. Policy lives in PolicyConfig; this is the machine the
/// policy runs on.
struct SimConfig {
  TierConfig fast{.frames = 4096, .peak_bytes_per_epoch = 32ull << 20, .base_latency = 1.0};
  TierConfig slow{.frames = 65536, .peak_bytes_per_epoch = 8ull << 20, .base_latency = 3.0};
  std::uint64_t epoch_events = 4096;
  std::uint64_t scan_interval = 2048;  // accesses between scan passes
  int scan_batch = 64;                 // folios armed per pass
  double demote_watermark = 0.90;
  double latency_slope = 1.0;
  std::uint64_t access_bytes = 64;
  std::uint64_t contention_bytes_per_epoch = 0;
  double contention_write_fraction = 0.0;
  int decay_interval_epochs = 4;
  int traffic_window_buckets = 8;
};

struct AdmissionResult {
  Verdict verdict = Verdict::Allow;
  RwClass page_class = RwClass::ReadHeavy;
};

struct FaultContext {
  const Folio& folio;
  Address fault_vaddr = 0;
  int fault_subpage = 0;
};

/// The three policy attachment points on the migration path. An empty slot
/// means the built-in default: no split (2 MB), all subfolios hot, allow.
struct HookRegistry {
  std::function<AdmissionResult(const FaultContext&)> migrate_admission;
  std::function<int(const FaultContext&)> pick_split_order;
  std::function<bool(const FaultContext&, int window, int order)> subpage_is_cold;
};

struct RunReport {
  std::uint64_t promote_success = 0;
  std::uint64_t promote_fail = 0;
  std::uint64_t demotions = 0;
  std::array<std::uint64_t, 5> splits_by_order{};  // orders 4..8
  std::uint64_t splits_order0 = 0;                 // full-4KB baseline splits
  std::uint64_t split_windows_total = 0;
  std::uint64_t split_windows_hot = 0;
  double hot_subfolio_fraction = 0.0;
  std::uint64_t tlb_hits = 0;
  std::uint64_t tlb_misses = 0;
  double tlb_misses_per_1k = 0.0;
  std::uint64_t bytes_migrated = 0;
  std::uint64_t admit_allowed = 0;
  std::uint64_t admit_prevented_read_heavy = 0;
  std::uint64_t admit_prevented_write_heavy = 0;
  double latency_proxy_total = 0.0;
  double throughput_proxy = 0.0;
  std::uint64_t events = 0;
  // 4 KB-equivalent counts alongside the folio-granularity counters above.
  std::uint64_t promote_success_pages = 0;
  std::uint64_t promote_fail_pages = 0;
  std::uint64_t demotion_pages = 0;

  std::uint64_t splits_at(int order) const { return splits_by_order[order - 4]; }
  std::uint64_t admit_prevented() const {
    return admit_prevented_read_heavy + admit_prevented_write_heavy;
  }
  std::uint64_t split_events_total() const {
    std::uint64_t n = splits_order0;
    for (auto v : splits_by_order) n += v;
    return n;
  }
};

/// Two tiers of buddy-allocated frames, the folio table, profiling state,
/// TLB proxy, and the hook-ordered hint-fault pipeline. Strictly
/// single-threaded and deterministic.
class MemoryState {
 public:
  MemoryState(const SimConfig& sim, const PolicyConfig& policy);

  /// Maps [base, base + bytes) as 2 MB folios in the slow tier. bytes must
  /// be a (positive) multiple of 2 MB.
  void map_region(Address base, std::uint64_t bytes);

  /// Pre-fragments the fast tier: within the first chunk_fraction of its
  /// 2 MB chunks, every even-numbered block of hole_order is taken, leaving
  /// only holes of that order there. The default order-0 checkerboard leaves
  /// single-frame holes.
  void checkerboard_fast(double chunk_fraction, int hole_order = 0);

  void set_hooks(HookRegistry hooks) { hooks_ = std::move(hooks); }
  void set_event_log(std::ostream* sink) { event_log_ = sink; }

  /// One access: TLB, bandwidth and traffic accounting, sampling, and the
  /// hint fault when the folio is armed. Returns the latency cost.
  double access(const AccessEvent& ev);

  /// Hook-ordered migration pipeline for one NUMA hint fault on a slow-tier
  /// folio: admission, splitting gate, split-order pick, target selection,
  /// per-target promotion.
  void hint_fault(Address folio_vaddr, Address fault_vaddr);

  /// Demotes least-recently-touched fast-tier folios until the used
  /// fraction is at or below the watermark. Returns the count demoted.
  std::uint64_t demote_if_pressured(double watermark);

  /// Drives the whole trace through the epoch loop and returns the report.
  RunReport run_trace(std::span<const AccessEvent> events);

  // Observation points, used by policy bindings and tests.
  const SubpageHistogram& histogram() const { return histogram_; }
  const DualBcbf* sketch() const { return sketch_.get(); }
  const TrafficWindow& traffic() const { return traffic_; }
  const BuddyAllocator& fast_buddy() const { return fast_.buddy; }
  const BuddyAllocator& slow_buddy() const { return slow_.buddy; }
  const RunReport& report() const { return report_; }
  const PolicyConfig& policy() const { return policy_; }
  std::size_t folio_count() const { return folios_.size(); }
  const Folio& folio_at(Address vaddr) const;
  bool splitting_active() const { return split_active_; }

 private:
  struct Tier {
    BuddyAllocator buddy;
    TierConfig cfg;
    std::uint64_t consumed = 0;
  };

  Folio& folio_ref(Address vaddr);
  Tier& tier(TierId id) { return id == TierId::Fast ? fast_ : slow_; }
  double cost_of_access(const Tier& t) const;
  bool promote(Address folio_vaddr);
  void demote(Folio& folio);
  void split_folio(Address folio_vaddr, int child_order);
  void arm_slow_folios(int budget);
  void begin_epoch();
  void end_epoch();
  void finalize(std::uint64_t events);
  void log_prevented(const Folio& folio, Address vaddr, RwClass cls);
  void log_whole(const Folio& folio, Address vaddr, bool ok);
  void log_split(const Folio& folio, Address vaddr, int order,
                 const std::vector<int>& targets, int promoted, int failed,
                 std::uint64_t bytes);

  SimConfig sim_;
  PolicyConfig policy_;
  Tier fast_;
  Tier slow_;
  std::map<Address, Folio> folios_;
  SubpageHistogram histogram_;
  Sampler sampler_;
  std::unique_ptr<DualBcbf> sketch_;  // FullDuplex only
  TrafficWindow traffic_;
  TlbModel tlb_;
  HookRegistry hooks_;
  RunReport report_;
  std::ostream* event_log_ = nullptr;
  bool split_active_ = false;
  std::uint64_t tick_ = 0;
  std::uint64_t epochs_ = 0;
  std::uint64_t next_folio_id_ = 1;
  Address scan_cursor_ = 0;
};

}  // namespace tiersim
