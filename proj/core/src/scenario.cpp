#include "tiersim/scenario.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json_support.hpp"
#include "tiersim/errors.hpp"
#include "tiersim/split_policy.hpp"

namespace tiersim {

namespace {

std::uint64_t mb(double v) {
  return static_cast<std::uint64_t>(std::llround(v * 1024.0 * 1024.0));
}

TraceSpec trace_spec_from_json(const nlohmann::json& j) {
  TraceSpec t;
  t.kind = trace_kind_from_string(j.at("kind").get<std::string>());
  detail::read_field(j, "n_events", t.n_events);
  if (j.contains("region_mb")) t.region_bytes = mb(j.at("region_mb").get<double>());
  detail::read_field(j, "region_bytes", t.region_bytes);
  detail::read_field(j, "write_fraction", t.write_fraction);
  detail::read_field(j, "seed", t.seed);
  detail::read_field(j, "zipf_s", t.zipf_s);
  if (j.contains("block_kb")) {
    t.block_bytes = static_cast<std::uint64_t>(
        std::llround(j.at("block_kb").get<double>() * 1024.0));
  }
  detail::read_field(j, "block_bytes", t.block_bytes);
  detail::read_field(j, "hot_fraction", t.hot_fraction);
  detail::read_field(j, "hot_weight", t.hot_weight);
  detail::read_field(j, "stride", t.stride);
  validate(t);
  return t;
}

SimConfig sim_from_json(const nlohmann::json& j, SimConfig sim) {
  if (j.contains("fast_mb")) sim.fast.frames = mb(j.at("fast_mb").get<double>()) / kPageBytes;
  if (j.contains("slow_mb")) sim.slow.frames = mb(j.at("slow_mb").get<double>()) / kPageBytes;
  if (j.contains("fast_peak_mb")) sim.fast.peak_bytes_per_epoch = mb(j.at("fast_peak_mb").get<double>());
  if (j.contains("slow_peak_mb")) sim.slow.peak_bytes_per_epoch = mb(j.at("slow_peak_mb").get<double>());
  detail::read_field(j, "fast_base_latency", sim.fast.base_latency);
  detail::read_field(j, "slow_base_latency", sim.slow.base_latency);
  detail::read_field(j, "epoch_events", sim.epoch_events);
  detail::read_field(j, "scan_interval", sim.scan_interval);
  detail::read_field(j, "scan_batch", sim.scan_batch);
  detail::read_field(j, "demote_watermark", sim.demote_watermark);
  detail::read_field(j, "latency_slope", sim.latency_slope);
  detail::read_field(j, "access_bytes", sim.access_bytes);
  detail::read_field(j, "decay_interval_epochs", sim.decay_interval_epochs);
  detail::read_field(j, "traffic_window_buckets", sim.traffic_window_buckets);
  detail::read_field(j, "contention_write_fraction", sim.contention_write_fraction);
  return sim;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario config is not valid JSON: ") + e.what());
  }
  try {
    Scenario s;
    detail::read_field(j, "name", s.name);
    if (j.contains("policy")) {
      s.policy = policy_from_string(j.at("policy").get<std::string>());
    }
    if (j.contains("policies")) {
      for (const auto& p : j.at("policies")) {
        s.sweep_policies.push_back(policy_from_string(p.get<std::string>()));
      }
    }
    if (j.contains("policy_config")) {
      s.policy_cfg = detail::policy_config_from_json(j.at("policy_config"));
    }
    if (j.contains("sim")) s.sim = sim_from_json(j.at("sim"), s.sim);
    detail::read_field(j, "contention_pct", s.contention_pct);
    detail::read_field(j, "checkerboard_fraction", s.checkerboard_fraction);
    if (j.contains("trace")) s.trace_spec = trace_spec_from_json(j.at("trace"));
    detail::read_field(j, "trace_path", s.trace_path);
    if (!s.trace_spec && s.trace_path.empty()) {
      throw ConfigError("scenario needs either a trace spec or a trace_path");
    }
    if (s.contention_pct < 0.0) throw ConfigError("contention_pct must be >= 0");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad scenario field: ") + e.what());
  } catch (const InvalidSpec& e) {
    throw ConfigError(e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::vector<AccessEvent> scenario_trace(const Scenario& s) {
  if (s.trace_spec) return generate(*s.trace_spec);
  if (!std::filesystem::exists(s.trace_path)) {
    throw ConfigError("trace file not found: " + s.trace_path);
  }
  return read_trace(s.trace_path);
}

namespace {

std::uint64_t region_of(const Scenario& s, std::span<const AccessEvent> events) {
  if (s.trace_spec) return s.trace_spec->region_bytes;
  Address max_vaddr = 0;
  for (const auto& ev : events) max_vaddr = std::max(max_vaddr, ev.vaddr);
  return ((max_vaddr / kThpBytes) + 1) * kThpBytes;
}

}  // namespace

RunReport run_one(const Scenario& s, std::span<const AccessEvent> events,
                  std::ostream* event_log, HistogramSnapshot* final_histogram) {
  SimConfig sim = s.sim;
  sim.contention_bytes_per_epoch = static_cast<std::uint64_t>(
      std::llround(s.contention_pct / 100.0 *
                   static_cast<double>(sim.slow.peak_bytes_per_epoch)));
  MemoryState ms(sim, s.policy_cfg);
  ms.map_region(0, region_of(s, events));
  if (s.checkerboard_fraction > 0.0) ms.checkerboard_fast(s.checkerboard_fraction);
  auto binding = attach_policy(s.policy, ms);
  ms.set_event_log(event_log);
  RunReport report = ms.run_trace(events);
  if (final_histogram) *final_histogram = ms.histogram().snapshot();
  return report;
}

std::vector<SweepRow> run_sweep(const Scenario& s,
                                std::span<const double> contention_levels) {
  std::vector<PolicyKind> policies = s.sweep_policies;
  if (policies.empty()) policies.push_back(s.policy);
  const std::vector<AccessEvent> events = scenario_trace(s);

  std::vector<SweepRow> rows;
  for (PolicyKind policy : policies) {
    for (double level : contention_levels) {
      Scenario run = s;
      run.policy = policy;
      run.contention_pct = level;
      SweepRow row;
      row.scenario = s.name;
      row.policy = policy;
      row.contention_pct = level;
      row.seed = s.policy_cfg.rng_seed;
      row.report = run_one(run, events);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

const char* const kResultsCsvHeader =
    "scenario,policy,contention_pct,promote_success,promote_fail,demotions,"
    "split_64k,split_128k,split_256k,split_512k,split_1m,hot_subfolio_pct,"
    "tlb_mpki,bytes_migrated,admit_allowed,admit_prevented,latency_total,"
    "throughput_proxy,seed";

void write_csv_header(std::ostream& out) { out << kResultsCsvHeader << '\n'; }

void write_csv_row(std::ostream& out, const SweepRow& row) {
  const RunReport& r = row.report;
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%.6g,%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64
                ",%" PRIu64 ",%" PRIu64 ",%" PRIu64
                ",%.4f,%.6f,%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%.6f,%.9f,%" PRIu64,
                row.contention_pct, r.promote_success, r.promote_fail,
                r.demotions, r.splits_at(4), r.splits_at(5), r.splits_at(6),
                r.splits_at(7), r.splits_at(8),
                r.hot_subfolio_fraction * 100.0, r.tlb_misses_per_1k,
                r.bytes_migrated, r.admit_allowed, r.admit_prevented(),
                r.latency_proxy_total, r.throughput_proxy, row.seed);
  out << row.scenario << ',' << to_string(row.policy) << ',' << buf << '\n';
}

std::string report_json(const SweepRow& row) {
  const RunReport& r = row.report;
  nlohmann::ordered_json j;
  j["scenario"] = row.scenario;
  j["policy"] = to_string(row.policy);
  j["contention_pct"] = row.contention_pct;
  j["seed"] = row.seed;
  j["events"] = r.events;
  j["promote_success"] = r.promote_success;
  j["promote_fail"] = r.promote_fail;
  j["demotions"] = r.demotions;
  j["splits"] = {{"64k", r.splits_at(4)},  {"128k", r.splits_at(5)},
                 {"256k", r.splits_at(6)}, {"512k", r.splits_at(7)},
                 {"1m", r.splits_at(8)},   {"4k_baseline", r.splits_order0}};
  j["hot_subfolio_fraction"] = r.hot_subfolio_fraction;
  j["tlb"] = {{"hits", r.tlb_hits},
              {"misses", r.tlb_misses},
              {"misses_per_1k", r.tlb_misses_per_1k}};
  j["bytes_migrated"] = r.bytes_migrated;
  j["admission"] = {{"allowed", r.admit_allowed},
                    {"prevented_read_heavy", r.admit_prevented_read_heavy},
                    {"prevented_write_heavy", r.admit_prevented_write_heavy}};
  j["latency_proxy_total"] = r.latency_proxy_total;
  j["throughput_proxy"] = r.throughput_proxy;
  j["pages_4k"] = {{"promote_success", r.promote_success_pages},
                   {"promote_fail", r.promote_fail_pages},
                   {"demoted", r.demotion_pages}};
  return j.dump(2);
}

std::string split_decision_json(const SplitDecision& d) {
  nlohmann::ordered_json j;
  j["order"] = d.order;
  j["size_bytes"] = order_bytes(d.order);
  j["targets"] = d.targets;
  j["entropy"] = d.entropy;
  j["reason"] = to_string(d.reason);
  j["threshold"] = d.threshold;
  j["kstar"] = d.kstar;
  return j.dump(2);
}

}  // namespace tiersim
