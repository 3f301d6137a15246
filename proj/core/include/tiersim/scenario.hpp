#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tiersim/config.hpp"
#include "tiersim/memsim.hpp"
#include "tiersim/policy_bindings.hpp"
#include "tiersim/workload.hpp"

namespace tiersim {

/// One experiment: a policy over a trace on a configured pair of tiers at a
/// contention level.
struct Scenario {
  std::string name = "scenario";
  PolicyKind policy = PolicyKind::NoSplit;
  std::vector<PolicyKind> sweep_policies;  // sweep set; empty means {policy}
  PolicyConfig policy_cfg;
  SimConfig sim;
  double contention_pct = 0.0;      // percent of slow-tier peak bandwidth
  double checkerboard_fraction = 0.0;
  std::optional<TraceSpec> trace_spec;
  std::string trace_path;  // used when trace_spec is absent
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

/// Materializes the scenario's trace (generating or loading it).
std::vector<AccessEvent> scenario_trace(const Scenario& s);

/// Runs one scenario end to end. The trace is passed in so sweeps reuse it.
/// When final_histogram is non-null it receives the post-run profiling
/// snapshot (for the CLI's debug dump).
RunReport run_one(const Scenario& s, std::span<const AccessEvent> events,
                  std::ostream* event_log = nullptr,
                  HistogramSnapshot* final_histogram = nullptr);

struct SweepRow {
  std::string scenario;
  PolicyKind policy = PolicyKind::NoSplit;
  double contention_pct = 0.0;
  std::uint64_t seed = 0;
  RunReport report;
};

/// One run per (policy, contention level), policies in scenario order,
/// levels in the order given.
std::vector<SweepRow> run_sweep(const Scenario& s,
                                std::span<const double> contention_levels);

/// Fixed CSV schema; the header line and column order are part of the
/// external contract.
extern const char* const kResultsCsvHeader;
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const SweepRow& row);

std::string report_json(const SweepRow& row);
std::string split_decision_json(const SplitDecision& d);

}  // namespace tiersim
