#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <vector>

#include "tiersim/rng.hpp"
#include "tiersim/types.hpp"

namespace tiersim {

/// A snapshot is a plain copy policy code can analyze without racing the
/// recorder.
struct HistogramSnapshot {
  std::array<std::uint64_t, kSubpagesPerThp> counts{};
  std::uint64_t total = 0;
};

/// Global subpage histogram: one 512-slot counter array per workload.
/// Accesses from every 2 MB region fold into the slot of their subpage
/// offset, so the structure stays 512 x 8 B no matter how large the working
/// set grows. Counters saturate instead of wrapping.
///
/// Increments are relaxed atomic RMWs; the reference simulator drives the
/// histogram single-threaded but concurrent recorders do not corrupt it.
class SubpageHistogram {
 public:
  SubpageHistogram() = default;

  SubpageHistogram(const SubpageHistogram&) = delete;
  SubpageHistogram& operator=(const SubpageHistogram&) = delete;

  void record(Address vaddr);

  HistogramSnapshot snapshot() const;

  /// Right-shifts every counter by min(shift, 10) and recomputes the total.
  /// Keeps profiles recent between analysis epochs.
  void decay(int shift);

  std::uint64_t total() const { return total_.load(std::memory_order_relaxed); }

  /// Fixed-size binary image: 512 little-endian u64 counters, 4096 bytes,
  /// independent of how much the histogram has seen.
  std::vector<std::uint8_t> serialize() const;

 private:
  std::array<std::atomic<std::uint64_t>, kSubpagesPerThp> counts_{};
  std::atomic<std::uint64_t> total_{0};
};

/// Bernoulli sampler standing in for a hardware event sampler. The hardware
/// rate has no meaning without a wall clock, so sampling is a fixed
/// per-access probability, deterministic in the seed.
class Sampler {
 public:
  Sampler(double sample_prob, std::uint64_t seed)
      : prob_(sample_prob), rng_(seed) {}

  bool sample(const AccessEvent&) { return rng_.next_unit() < prob_; }

 private:
  double prob_;
  SplitMix64 rng_;
};

}  // namespace tiersim
