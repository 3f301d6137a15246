#pragma once

#include <bitset>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tiersim/config.hpp"
#include "tiersim/profiling.hpp"
#include "tiersim/types.hpp"

namespace tiersim {

/// Binary hot/cold classification of the 512 subpage slots, plus the
/// threshold that produced it.
struct HotMap {
  std::bitset<kSubpagesPerThp> bits;
  std::uint64_t threshold = 0;  // T
  int kstar = 0;                // K*

  int hot_in(int offset, int len) const {
    int n = 0;
    for (int i = offset; i < offset + len; ++i) n += bits[i];
    return n;
  }
};

enum class SplitReason { FlatDistribution, DensityPick, FallbackSmallest };

std::string to_string(SplitReason r);

/// Outcome of the splitting pipeline for one faulting THP. order 9 means the
/// folio migrates whole; otherwise `targets` lists the aligned windows of
/// that order to migrate.
struct SplitDecision {
  int order = kOrder2M;
  std::vector<int> targets;  // window indices, sorted; empty iff order == 9
  double entropy = 0.0;
  SplitReason reason = SplitReason::FlatDistribution;
  std::uint64_t threshold = 0;
  int kstar = 0;

  bool operator==(const SplitDecision&) const = default;
};

struct HotThreshold {
  std::uint64_t threshold = 0;
  int kstar = 0;
};

/// Normalized Shannon entropy of the slot distribution, in [0, 1].
/// 0 = one-hot, 1 = uniform. Throws AllZeroHistogram on empty input.
double normalized_entropy(std::span<const std::uint64_t, kSubpagesPerThp> counts);

/// Stage 1: smallest K* whose top-(K*+1) slots (sorted descending) cover at
/// least fraction P of the total; T is the count at rank K*. The comparison
/// is done in integers to keep coverage boundaries exact.
HotThreshold hot_threshold(std::span<const std::uint64_t, kSubpagesPerThp> counts,
                           double coverage_p);

/// Stage 2: slot i is hot iff counts[i] >= T.
HotMap classify_hot(std::span<const std::uint64_t, kSubpagesPerThp> counts,
                    std::uint64_t threshold);

/// Stage 3 helper: fraction of hot slots in the aligned window [offset,
/// offset+len). Throws MisalignedWindow when offset is not a multiple of len
/// or the window runs past slot 512.
double heat_density(const HotMap& map, int offset, int len);

/// Stage 3: largest candidate order with at least one window of heat density
/// >= tau; order 4 with FallbackSmallest when none qualifies.
struct OrderPick {
  int order = kOrder2M;
  SplitReason reason = SplitReason::DensityPick;
};
OrderPick pick_split_order(const HotMap& map, double tau);

/// Stage 4: windows that are tau-dense plus the window holding the faulting
/// subpage. Valid for orders 4..8; never empty.
std::vector<int> select_targets(const HotMap& map, int order, int fault_subpage,
                                double tau);

/// Whole pipeline with flat-distribution detection in front. All-zero
/// snapshots and snapshots at or above the entropy gate migrate whole
/// (order 9, no targets). When out_map is non-null and the stages run, the
/// HotMap used for the decision is copied there.
SplitDecision decide_split(const HistogramSnapshot& snap, const PolicyConfig& cfg,
                           int fault_subpage, HotMap* out_map = nullptr);

}  // namespace tiersim
