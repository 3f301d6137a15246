#include <vector>

#include "doctest.h"

#include "tiersim/buddy.hpp"
#include "tiersim/errors.hpp"
#include "tiersim/rng.hpp"

using namespace tiersim;

namespace {

// Carve the classic worst case: every even frame taken, only order-0 holes
// left.
void checkerboard(BuddyAllocator& b) {
  const std::uint64_t frames = b.frame_count();
  for (std::uint64_t f = 0; f < frames; ++f) REQUIRE(b.alloc(0) == f);
  for (std::uint64_t f = 1; f < frames; f += 2) b.free(f, 0);
}

}  // namespace

TEST_CASE("empty tier serves a 2MB block at frame zero") {
  BuddyAllocator b(1024);
  CHECK(b.alloc(9) == 0);
  CHECK(b.used_frames() == 512);
}

TEST_CASE("checkerboard fragmentation defeats large orders only") {
  BuddyAllocator b(1024);
  checkerboard(b);
  CHECK(b.alloc(9) == std::nullopt);
  CHECK(b.alloc(4) == std::nullopt);
  CHECK(b.used_frames() == 512);  // unchanged by the failures
  CHECK(b.alloc(0).has_value());
}

TEST_CASE("free round-trip restores the tier") {
  BuddyAllocator b(1024);
  const std::uint64_t before = b.free_frames();
  const auto f = b.alloc(9);
  REQUIRE(f.has_value());
  b.free(*f, 9);
  CHECK(b.free_frames() == before);
  CHECK(b.free_blocks(9) == 2);
}

TEST_CASE("sibling order-0 buddies coalesce into one order-1 block") {
  BuddyAllocator b(512);
  // Frame 2 stays allocated so the merge stops exactly at order 1.
  const auto a = b.alloc(0);
  const auto c = b.alloc(0);
  const auto guard = b.alloc(0);
  REQUIRE(a == 0);
  REQUIRE(c == 1);
  REQUIRE(guard == 2);
  b.free(*a, 0);
  CHECK(b.free_blocks(0) == 2);  // frame 0 plus the split leftover at 3
  b.free(*c, 0);
  CHECK(b.free_blocks(0) == 1);
  CHECK(b.free_blocks(1) == 1);
}

TEST_CASE("double free is rejected") {
  BuddyAllocator b(512);
  const auto f = b.alloc(4);
  REQUIRE(f.has_value());
  b.free(*f, 4);
  CHECK_THROWS_AS(b.free(*f, 4), DoubleFree);
  CHECK_THROWS_AS(b.free(100, 0), DoubleFree);
}

TEST_CASE("split_allocated rewrites a live block in place") {
  BuddyAllocator b(512);
  const auto f = b.alloc(9);
  REQUIRE(f == 0);
  b.split_allocated(0, 9, 7);
  CHECK(b.used_frames() == 512);
  // Children are individually freeable now.
  b.free(0, 7);
  b.free(128, 7);
  CHECK(b.used_frames() == 256);
  CHECK_THROWS_AS(b.free(0, 9), DoubleFree);
}

TEST_CASE("frame conservation under random churn") {
  BuddyAllocator b(4096);
  SplitMix64 rng(71);
  std::vector<std::pair<std::uint64_t, int>> live;
  for (int step = 0; step < 5000; ++step) {
    std::uint64_t live_frames = 0;
    for (const auto& [f, o] : live) live_frames += 1ull << o;
    REQUIRE(b.used_frames() == live_frames);
    REQUIRE(b.used_frames() + b.free_frames() == b.frame_count());

    if (live.empty() || rng.next() % 3 != 0) {
      const int order = static_cast<int>(rng.next_below(10));
      if (!valid_folio_order(order)) continue;
      if (const auto f = b.alloc(order)) {
        // Alignment invariant: blocks sit on their order boundary.
        REQUIRE(*f % (1ull << order) == 0);
        live.emplace_back(*f, order);
      }
    } else {
      const std::size_t i = rng.next_below(live.size());
      b.free(live[i].first, live[i].second);
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }
  for (const auto& [f, o] : live) b.free(f, o);
  CHECK(b.free_frames() == b.frame_count());
  CHECK(b.free_blocks(9) == 8);  // everything coalesced back to 2MB chunks
}
