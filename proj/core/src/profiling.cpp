#include "tiersim/profiling.hpp"

#include <limits>

namespace tiersim {

namespace {

constexpr std::uint64_t kCounterMax = std::numeric_limits<std::uint64_t>::max();
constexpr int kMaxDecayShift = 10;

void saturating_increment(std::atomic<std::uint64_t>& c) {
  std::uint64_t cur = c.load(std::memory_order_relaxed);
  while (cur != kCounterMax &&
         !c.compare_exchange_weak(cur, cur + 1, std::memory_order_relaxed)) {
  }
}

}  // namespace

void SubpageHistogram::record(Address vaddr) {
  saturating_increment(counts_[subpage_index(vaddr)]);
  saturating_increment(total_);
}

HistogramSnapshot SubpageHistogram::snapshot() const {
  HistogramSnapshot s;
  for (int i = 0; i < kSubpagesPerThp; ++i) {
    s.counts[i] = counts_[i].load(std::memory_order_relaxed);
  }
  s.total = total_.load(std::memory_order_relaxed);
  return s;
}

void SubpageHistogram::decay(int shift) {
  if (shift <= 0) return;
  const int s = shift < kMaxDecayShift ? shift : kMaxDecayShift;
  std::uint64_t sum = 0;
  for (auto& c : counts_) {
    const std::uint64_t v = c.load(std::memory_order_relaxed) >> s;
    c.store(v, std::memory_order_relaxed);
    sum += v;
  }
  total_.store(sum, std::memory_order_relaxed);
}

std::vector<std::uint8_t> SubpageHistogram::serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(kSubpagesPerThp * 8);
  for (int i = 0; i < kSubpagesPerThp; ++i) {
    std::uint64_t v = counts_[i].load(std::memory_order_relaxed);
    for (int b = 0; b < 8; ++b) {
      out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
    }
  }
  return out;
}

}  // namespace tiersim
