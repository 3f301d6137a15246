#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

#include "tiersim/types.hpp"

namespace tiersim {

/// Blocked counting Bloom filter. Counters live in 64-byte blocks (one cache
/// line of 8-bit counters) and every one of a key's k counters sits inside a
/// single block, so a lookup touches exactly one line. Get returns the
/// minimum of the k counters; Update increments only the counters currently
/// at that minimum (conservative update). Counters saturate at 255.
///
/// Keys are 4 KB page numbers: addresses are truncated with >> 12 before
/// hashing. Counter updates are relaxed atomics, same contract as the
/// subpage histogram.
class BlockedCbf {
 public:
  static constexpr int kCountersPerBlock = 64;
  static constexpr std::uint8_t kCounterMax = 255;

  explicit BlockedCbf(std::size_t blocks = 4096, int k = 4,
                      std::uint64_t hash_seed = 0);

  BlockedCbf(const BlockedCbf&) = delete;
  BlockedCbf& operator=(const BlockedCbf&) = delete;

  void update(Address page_addr);

  std::uint32_t get(Address page_addr) const;

  /// Halves every counter. Ages out stale history.
  void decay();

  std::size_t blocks() const { return blocks_; }
  int k() const { return k_; }

  /// The k counter indices a page maps to, for tests and diagnostics.
  std::vector<std::size_t> probe_indices(Address page_addr) const;

  /// The k counter values a page maps to.
  std::vector<std::uint8_t> probe_counters(Address page_addr) const;

 private:
  std::size_t blocks_;
  int k_;
  std::uint64_t hash_seed_;
  std::vector<std::atomic<std::uint8_t>> counters_;
};

/// Paired filters answering approximate per-page read and write counts.
/// Both share geometry but hash with distinct seeds.
class DualBcbf {
 public:
  explicit DualBcbf(std::size_t blocks = 4096, int k = 4,
                    std::uint64_t seed = 0);

  void record(Address page_addr, bool is_write);

  std::uint32_t read_count(Address page_addr) const { return reads_.get(page_addr); }
  std::uint32_t write_count(Address page_addr) const { return writes_.get(page_addr); }

  /// w_min / (w_min + r_min); 0 when the page has never been seen, which
  /// classifies unknown pages as read-heavy (the least-restricted class
  /// under read-dominant traffic).
  double write_ratio(Address page_addr) const;

  void decay();

  BlockedCbf& reads() { return reads_; }
  BlockedCbf& writes() { return writes_; }

 private:
  BlockedCbf reads_;
  BlockedCbf writes_;
};

}  // namespace tiersim
