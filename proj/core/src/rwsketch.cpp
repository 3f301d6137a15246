#include "tiersim/rwsketch.hpp"

#include "tiersim/errors.hpp"
#include "tiersim/rng.hpp"

namespace tiersim {

BlockedCbf::BlockedCbf(std::size_t blocks, int k, std::uint64_t hash_seed)
    : blocks_(blocks), k_(k), hash_seed_(hash_seed),
      counters_(blocks * kCountersPerBlock) {
  if (blocks_ == 0 || k_ <= 0 || k_ > kCountersPerBlock) {
    throw InvalidSpec("bad bCBF geometry");
  }
}

std::vector<std::size_t> BlockedCbf::probe_indices(Address page_addr) const {
  const std::uint64_t page = page_addr >> 12;
  const std::uint64_t h = mix64(page ^ hash_seed_);
  const std::size_t block = static_cast<std::size_t>(h % blocks_);
  const std::uint64_t h2 = mix64(h);
  // Double hashing within the block; an odd step makes the k offsets distinct.
  const std::uint64_t start = h2 & (kCountersPerBlock - 1);
  const std::uint64_t step = ((h2 >> 32) | 1) & (kCountersPerBlock - 1);
  std::vector<std::size_t> idx(static_cast<std::size_t>(k_));
  for (int i = 0; i < k_; ++i) {
    idx[i] = block * kCountersPerBlock +
             ((start + static_cast<std::uint64_t>(i) * step) & (kCountersPerBlock - 1));
  }
  return idx;
}

std::vector<std::uint8_t> BlockedCbf::probe_counters(Address page_addr) const {
  std::vector<std::uint8_t> out;
  for (std::size_t i : probe_indices(page_addr)) {
    out.push_back(counters_[i].load(std::memory_order_relaxed));
  }
  return out;
}

void BlockedCbf::update(Address page_addr) {
  const auto idx = probe_indices(page_addr);
  std::uint8_t minimum = kCounterMax;
  for (std::size_t i : idx) {
    const std::uint8_t v = counters_[i].load(std::memory_order_relaxed);
    if (v < minimum) minimum = v;
  }
  if (minimum == kCounterMax) return;  // saturated, silently
  for (std::size_t i : idx) {
    if (counters_[i].load(std::memory_order_relaxed) == minimum) {
      counters_[i].fetch_add(1, std::memory_order_relaxed);
    }
  }
}

std::uint32_t BlockedCbf::get(Address page_addr) const {
  std::uint8_t minimum = kCounterMax;
  for (std::size_t i : probe_indices(page_addr)) {
    const std::uint8_t v = counters_[i].load(std::memory_order_relaxed);
    if (v < minimum) minimum = v;
  }
  return minimum;
}

void BlockedCbf::decay() {
  for (auto& c : counters_) {
    c.store(c.load(std::memory_order_relaxed) >> 1, std::memory_order_relaxed);
  }
}

DualBcbf::DualBcbf(std::size_t blocks, int k, std::uint64_t seed)
    : reads_(blocks, k, mix64(seed ^ 0x72656164ULL)),   // "read"
      writes_(blocks, k, mix64(seed ^ 0x77726974ULL)) {}  // "writ"

void DualBcbf::record(Address page_addr, bool is_write) {
  (is_write ? writes_ : reads_).update(page_addr);
}

double DualBcbf::write_ratio(Address page_addr) const {
  const std::uint32_t w = writes_.get(page_addr);
  const std::uint32_t r = reads_.get(page_addr);
  if (w + r == 0) return 0.0;
  return static_cast<double>(w) / static_cast<double>(w + r);
}

void DualBcbf::decay() {
  reads_.decay();
  writes_.decay();
}

}  // namespace tiersim
