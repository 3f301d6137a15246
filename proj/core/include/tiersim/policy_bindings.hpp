#pragma once

#include <memory>
#include <string>

#include "tiersim/memsim.hpp"
#include "tiersim/split_policy.hpp"

namespace tiersim {

enum class PolicyKind { NoSplit, Full4KSplit, TierBpf, TierBpfPlusAdmission };

std::string to_string(PolicyKind p);
PolicyKind policy_from_string(const std::string& s);

/// Owns whatever per-fault state a policy keeps between its hooks (the
/// user-space-daemon side of the policy). Must outlive the run it is
/// attached to.
class PolicyBinding {
 public:
  virtual ~PolicyBinding() = default;
  virtual HookRegistry hooks() = 0;
};

/// Builds the binding for a policy and attaches its hooks to the state.
/// NoSplit attaches nothing and runs on the built-in defaults.
std::unique_ptr<PolicyBinding> attach_policy(PolicyKind kind, MemoryState& ms);

}  // namespace tiersim
