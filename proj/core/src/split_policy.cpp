#include "tiersim/split_policy.hpp"

#include <algorithm>
#include <cmath>

#include "tiersim/errors.hpp"

namespace tiersim {

std::string to_string(SplitReason r) {
  switch (r) {
    case SplitReason::FlatDistribution: return "FlatDistribution";
    case SplitReason::DensityPick: return "DensityPick";
    case SplitReason::FallbackSmallest: return "FallbackSmallest";
  }
  return "?";
}

namespace {

constexpr std::int64_t kFractionScale = 10000;  // basis points

std::int64_t to_basis_points(double fraction) {
  return static_cast<std::int64_t>(std::llround(fraction * kFractionScale));
}

// sum/total >= fraction, evaluated exactly in integers.
bool covers(std::uint64_t sum, std::uint64_t total, std::int64_t fraction_bp) {
  return static_cast<unsigned __int128>(sum) * kFractionScale >=
         static_cast<unsigned __int128>(total) * static_cast<std::uint64_t>(fraction_bp);
}

}  // namespace

double normalized_entropy(std::span<const std::uint64_t, kSubpagesPerThp> counts) {
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  if (total == 0) throw AllZeroHistogram();

  double h = 0.0;
  for (std::uint64_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h / std::log2(static_cast<double>(kSubpagesPerThp));
}

HotThreshold hot_threshold(std::span<const std::uint64_t, kSubpagesPerThp> counts,
                           double coverage_p) {
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  if (total == 0) throw AllZeroHistogram();

  std::array<std::uint64_t, kSubpagesPerThp> sorted;
  std::copy(counts.begin(), counts.end(), sorted.begin());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  const std::int64_t p_bp = to_basis_points(coverage_p);
  std::uint64_t prefix = 0;
  for (int i = 0; i < kSubpagesPerThp; ++i) {
    prefix += sorted[i];
    if (covers(prefix, total, p_bp)) {
      return HotThreshold{sorted[i], i};
    }
  }
  // coverage_p <= 1 and the full prefix equals the total, so we cannot get
  // here with a valid config.
  return HotThreshold{sorted[kSubpagesPerThp - 1], kSubpagesPerThp - 1};
}

HotMap classify_hot(std::span<const std::uint64_t, kSubpagesPerThp> counts,
                    std::uint64_t threshold) {
  HotMap map;
  map.threshold = threshold;
  for (int i = 0; i < kSubpagesPerThp; ++i) {
    map.bits[i] = counts[i] >= threshold;
  }
  return map;
}

double heat_density(const HotMap& map, int offset, int len) {
  if (len <= 0 || offset < 0 || offset % len != 0 ||
      offset + len > kSubpagesPerThp) {
    throw MisalignedWindow("window [" + std::to_string(offset) + ", +" +
                           std::to_string(len) + ") is not an aligned subfolio");
  }
  return static_cast<double>(map.hot_in(offset, len)) / static_cast<double>(len);
}

namespace {

bool any_dense_window(const HotMap& map, int order, std::int64_t tau_bp) {
  const int len = order_subpages(order);
  for (int offset = 0; offset < kSubpagesPerThp; offset += len) {
    const auto hot = static_cast<std::uint64_t>(map.hot_in(offset, len));
    if (covers(hot, static_cast<std::uint64_t>(len), tau_bp)) return true;
  }
  return false;
}

}  // namespace

OrderPick pick_split_order(const HotMap& map, double tau) {
  const std::int64_t tau_bp = to_basis_points(tau);
  for (int order : kSplitOrders) {
    if (any_dense_window(map, order, tau_bp)) {
      return OrderPick{order, SplitReason::DensityPick};
    }
  }
  return OrderPick{kOrder64K, SplitReason::FallbackSmallest};
}

std::vector<int> select_targets(const HotMap& map, int order, int fault_subpage,
                                double tau) {
  const std::int64_t tau_bp = to_basis_points(tau);
  const int len = order_subpages(order);
  const int fault_window = fault_subpage / len;
  std::vector<int> targets;
  for (int w = 0; w * len < kSubpagesPerThp; ++w) {
    const auto hot = static_cast<std::uint64_t>(map.hot_in(w * len, len));
    if (covers(hot, static_cast<std::uint64_t>(len), tau_bp) || w == fault_window) {
      targets.push_back(w);
    }
  }
  return targets;
}

SplitDecision decide_split(const HistogramSnapshot& snap, const PolicyConfig& cfg,
                           int fault_subpage, HotMap* out_map) {
  SplitDecision d;
  if (snap.total == 0) {
    // No profiling signal; treat like a flat distribution and migrate whole.
    d.entropy = 1.0;
    return d;
  }
  d.entropy = normalized_entropy(snap.counts);
  if (d.entropy >= cfg.entropy_gate) {
    return d;  // order 9, FlatDistribution
  }

  const HotThreshold ht = hot_threshold(snap.counts, cfg.coverage_p);
  HotMap map = classify_hot(snap.counts, ht.threshold);
  map.kstar = ht.kstar;
  d.threshold = ht.threshold;
  d.kstar = ht.kstar;

  const OrderPick pick = pick_split_order(map, cfg.tau_h);
  d.order = pick.order;
  d.reason = pick.reason;
  if (d.order < kOrder2M) {
    d.targets = select_targets(map, d.order, fault_subpage, cfg.tau_h);
  }
  if (out_map) *out_map = map;
  return d;
}

}  // namespace tiersim
