#pragma once

#include <cstdint>
#include <string>

#include "tiersim/types.hpp"

namespace tiersim {

/// Policy knobs. Loaded from a flat JSON object where every field below is a
/// top-level key of the same name.
struct PolicyConfig {
  double coverage_p = 0.80;       // key "coverage_P": hot-set coverage ratio
  double tau_h = 0.75;            // heat-density cut for subfolio selection
  double entropy_gate = 0.95;     // flat-distribution detection threshold
  double sample_prob = 0.01;      // per-access Bernoulli sampling probability
  double contention_gate = 0.50;  // slow-tier peak fraction that activates splitting
  double traffic_theta = 0.70;    // read-share dominance threshold
  double write_heavy_cut = 0.5;   // write_ratio at or above => WriteHeavy
  DuplexMode duplex_mode = DuplexMode::FullDuplex;
  int tlb_entries = 1536;
  std::uint64_t rng_seed = 42;
};

/// Parses a PolicyConfig from flat JSON text. Missing keys keep their
/// defaults; out-of-range values throw ConfigError.
PolicyConfig parse_policy_config(const std::string& json_text);

PolicyConfig load_policy_config(const std::string& path);

void validate(const PolicyConfig& cfg);

std::string to_string(DuplexMode mode);
DuplexMode duplex_from_string(const std::string& s);

}  // namespace tiersim
