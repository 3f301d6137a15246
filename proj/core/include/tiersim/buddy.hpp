#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>

#include "tiersim/types.hpp"

namespace tiersim {

/// Binary buddy allocator over a tier's 4 KB frames, orders 0..9.
/// Allocation takes the lowest-addressed suitable block, so identical call
/// sequences carve identical layouts.
class BuddyAllocator {
 public:
  static constexpr int kMaxOrder = 9;

  /// frame_count must be a positive multiple of 512 (whole 2 MB chunks).
  explicit BuddyAllocator(std::uint64_t frame_count);

  /// Removes an aligned 2^order block from the free lists, splitting larger
  /// blocks as needed. std::nullopt when no contiguous block exists; the
  /// tier is untouched in that case.
  std::optional<std::uint64_t> alloc(int order);

  /// Returns a previously allocated block, coalescing with free buddies.
  /// Throws DoubleFree when (frame, order) is not a live allocation.
  void free(std::uint64_t frame, int order);

  /// Rewrites one live allocation as its 2^(order - child_order) aligned
  /// children, without touching the free lists. Used when a folio is split
  /// in place.
  void split_allocated(std::uint64_t frame, int order, int child_order);

  std::uint64_t frame_count() const { return frames_; }
  std::uint64_t used_frames() const { return used_; }
  std::uint64_t free_frames() const { return frames_ - used_; }
  double used_fraction() const {
    return static_cast<double>(used_) / static_cast<double>(frames_);
  }

  std::size_t free_blocks(int order) const { return free_[order].size(); }

 private:
  std::uint64_t frames_;
  std::uint64_t used_ = 0;
  std::array<std::set<std::uint64_t>, kMaxOrder + 1> free_;
  std::map<std::uint64_t, int> allocated_;  // start frame -> order
};

}  // namespace tiersim
