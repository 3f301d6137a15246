#include "tiersim/policy_bindings.hpp"

#include "tiersim/admission.hpp"
#include "tiersim/errors.hpp"

namespace tiersim {

std::string to_string(PolicyKind p) {
  switch (p) {
    case PolicyKind::NoSplit: return "NoSplit";
    case PolicyKind::Full4KSplit: return "Full4KSplit";
    case PolicyKind::TierBpf: return "TierBpf";
    case PolicyKind::TierBpfPlusAdmission: return "TierBpfPlusAdmission";
  }
  return "?";
}

PolicyKind policy_from_string(const std::string& s) {
  if (s == "NoSplit") return PolicyKind::NoSplit;
  if (s == "Full4KSplit") return PolicyKind::Full4KSplit;
  if (s == "TierBpf") return PolicyKind::TierBpf;
  if (s == "TierBpfPlusAdmission") return PolicyKind::TierBpfPlusAdmission;
  throw ConfigError("unknown policy '" + s + "'");
}

namespace {

class NoSplitBinding final : public PolicyBinding {
 public:
  HookRegistry hooks() override { return {}; }
};

/// All-or-nothing baseline: shatter the faulting THP to base pages and
/// promote the fault page plus whatever the histogram says is hot.
class Full4KBinding final : public PolicyBinding {
 public:
  explicit Full4KBinding(MemoryState& ms) : ms_(&ms) {}

  HookRegistry hooks() override {
    HookRegistry h;
    h.pick_split_order = [this](const FaultContext&) {
      const HistogramSnapshot snap = ms_->histogram().snapshot();
      have_map_ = false;
      if (snap.total > 0) {
        const HotThreshold ht = hot_threshold(snap.counts, ms_->policy().coverage_p);
        map_ = classify_hot(snap.counts, ht.threshold);
        have_map_ = true;
      }
      return kOrder4K;
    };
    h.subpage_is_cold = [this](const FaultContext&, int window, int) {
      return !have_map_ || !map_.bits[window];
    };
    return h;
  }

 private:
  MemoryState* ms_;
  HotMap map_;
  bool have_map_ = false;
};

/// The four-stage pipeline bound to the two splitting hooks. The order pick
/// retains the hot map so the per-subfolio classification sees the same
/// snapshot the order decision saw.
class TierBpfBinding : public PolicyBinding {
 public:
  explicit TierBpfBinding(MemoryState& ms) : ms_(&ms) {}

  HookRegistry hooks() override {
    HookRegistry h;
    h.pick_split_order = [this](const FaultContext& ctx) {
      HotMap map;
      const SplitDecision d =
          decide_split(ms_->histogram().snapshot(), ms_->policy(),
                       ctx.fault_subpage, &map);
      have_map_ = d.order < kOrder2M;
      if (have_map_) map_ = map;
      return d.order;
    };
    h.subpage_is_cold = [this](const FaultContext&, int window, int order) {
      if (!have_map_) return false;
      const int len = order_subpages(order);
      return heat_density(map_, window * len, len) < ms_->policy().tau_h;
    };
    return h;
  }

 protected:
  MemoryState* ms_;

 private:
  HotMap map_;
  bool have_map_ = false;
};

class TierBpfPlusAdmissionBinding final : public TierBpfBinding {
 public:
  explicit TierBpfPlusAdmissionBinding(MemoryState& ms) : TierBpfBinding(ms) {}

  HookRegistry hooks() override {
    HookRegistry h = TierBpfBinding::hooks();
    h.migrate_admission = [this](const FaultContext& ctx) {
      AdmissionResult r;
      const PolicyConfig& cfg = ms_->policy();
      if (cfg.duplex_mode == DuplexMode::HalfDuplex || !ms_->sketch()) {
        return r;  // pass-through on half-duplex memory
      }
      r.page_class =
          classify_page(*ms_->sketch(), ctx.fault_vaddr, cfg.write_heavy_cut);
      const TrafficClass traffic =
          classify_traffic(ms_->traffic(), cfg.traffic_theta);
      r.verdict = admit(r.page_class, traffic, cfg.duplex_mode);
      return r;
    };
    return h;
  }
};

}  // namespace

std::unique_ptr<PolicyBinding> attach_policy(PolicyKind kind, MemoryState& ms) {
  std::unique_ptr<PolicyBinding> binding;
  switch (kind) {
    case PolicyKind::NoSplit:
      binding = std::make_unique<NoSplitBinding>();
      break;
    case PolicyKind::Full4KSplit:
      binding = std::make_unique<Full4KBinding>(ms);
      break;
    case PolicyKind::TierBpf:
      binding = std::make_unique<TierBpfBinding>(ms);
      break;
    case PolicyKind::TierBpfPlusAdmission:
      binding = std::make_unique<TierBpfPlusAdmissionBinding>(ms);
      break;
  }
  ms.set_hooks(binding->hooks());
  return binding;
}

}  // namespace tiersim
