#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace tiersim {

/// Virtual byte address.
using Address = std::uint64_t;

inline constexpr std::uint64_t kPageBytes = 4096;
inline constexpr std::uint64_t kThpBytes = 2ull << 20;
inline constexpr int kSubpagesPerThp = 512;

/// Folio orders. A folio of order o spans 2^o base frames (4096 << o bytes).
/// Order 0 exists only for the full-4KB-split baseline; the splitting policy
/// chooses from kSplitOrders.
inline constexpr int kOrder4K = 0;
inline constexpr int kOrder64K = 4;
inline constexpr int kOrder128K = 5;
inline constexpr int kOrder256K = 6;
inline constexpr int kOrder512K = 7;
inline constexpr int kOrder1M = 8;
inline constexpr int kOrder2M = 9;

/// Candidate split orders, scanned largest-first.
inline constexpr std::array<int, 6> kSplitOrders{9, 8, 7, 6, 5, 4};

constexpr bool valid_folio_order(int order) {
  return order == 0 || (order >= 4 && order <= 9);
}

constexpr std::uint64_t order_bytes(int order) { return kPageBytes << order; }

/// Subpages (4 KB units) covered by one folio of the given order.
constexpr int order_subpages(int order) { return 1 << order; }

enum class TierId { Fast, Slow };

enum class RwClass { ReadHeavy, WriteHeavy };

enum class TrafficClass { ReadDominant, Balanced, WriteDominant };

enum class DuplexMode { FullDuplex, HalfDuplex };

struct AccessEvent {
  std::uint64_t tick = 0;
  Address vaddr = 0;
  bool is_write = false;

  bool operator==(const AccessEvent&) const = default;
};

struct Folio {
  std::uint64_t id = 0;
  std::uint64_t base_frame = 0;
  int order = kOrder2M;
  TierId tier = TierId::Slow;
  Address owner_vaddr = 0;
  std::uint64_t last_touch = 0;
  bool fault_armed = false;

  std::uint64_t bytes() const { return order_bytes(order); }
};

/// Slot of an address within its 2 MB-aligned region: (vaddr mod 2MB) / 4KB.
/// Periodic with period 2 MB, so samples from every THP of a workload fold
/// into the same 512 slots.
constexpr std::size_t subpage_index(Address vaddr) {
  return static_cast<std::size_t>((vaddr & (kThpBytes - 1)) >> 12);
}

}  // namespace tiersim
