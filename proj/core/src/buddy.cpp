#include "tiersim/buddy.hpp"

#include <string>

#include "tiersim/errors.hpp"

namespace tiersim {

BuddyAllocator::BuddyAllocator(std::uint64_t frame_count) : frames_(frame_count) {
  if (frame_count == 0 || frame_count % 512 != 0) {
    throw InvalidSpec("tier frame count must be a positive multiple of 512");
  }
  for (std::uint64_t f = 0; f < frame_count; f += 512) {
    free_[kMaxOrder].insert(f);
  }
}

std::optional<std::uint64_t> BuddyAllocator::alloc(int order) {
  if (!valid_folio_order(order)) {
    throw InvalidSpec("bad folio order " + std::to_string(order));
  }
  int from = -1;
  for (int o = order; o <= kMaxOrder; ++o) {
    if (!free_[o].empty()) {
      from = o;
      break;
    }
  }
  if (from < 0) return std::nullopt;

  std::uint64_t frame = *free_[from].begin();
  free_[from].erase(free_[from].begin());
  // Split down, returning the upper halves to their free lists.
  for (int o = from; o > order; --o) {
    free_[o - 1].insert(frame + (1ull << (o - 1)));
  }
  allocated_.emplace(frame, order);
  used_ += 1ull << order;
  return frame;
}

void BuddyAllocator::free(std::uint64_t frame, int order) {
  auto it = allocated_.find(frame);
  if (it == allocated_.end() || it->second != order) {
    throw DoubleFree("block at frame " + std::to_string(frame) + " order " +
                     std::to_string(order) + " is not allocated");
  }
  allocated_.erase(it);
  used_ -= 1ull << order;

  std::uint64_t f = frame;
  int o = order;
  while (o < kMaxOrder) {
    const std::uint64_t buddy = f ^ (1ull << o);
    auto b = free_[o].find(buddy);
    if (b == free_[o].end()) break;
    free_[o].erase(b);
    f = f < buddy ? f : buddy;
    ++o;
  }
  free_[o].insert(f);
}

void BuddyAllocator::split_allocated(std::uint64_t frame, int order,
                                     int child_order) {
  auto it = allocated_.find(frame);
  if (it == allocated_.end() || it->second != order) {
    throw DoubleFree("cannot split unallocated block at frame " +
                     std::to_string(frame));
  }
  if (child_order >= order || !valid_folio_order(child_order)) {
    throw InvalidSpec("bad split target order " + std::to_string(child_order));
  }
  allocated_.erase(it);
  const std::uint64_t step = 1ull << child_order;
  for (std::uint64_t f = frame; f < frame + (1ull << order); f += step) {
    allocated_.emplace(f, child_order);
  }
}

}  // namespace tiersim
