#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tiersim/errors.hpp"
#include "tiersim/log.hpp"
#include "tiersim/scenario.hpp"
#include "tiersim/split_policy.hpp"
#include "tiersim/workload.hpp"

namespace fs = std::filesystem;
using namespace tiersim;

namespace {

struct CommonOpts {
  std::string config;
  std::string out_dir = ".";
  std::string event_log;
  std::optional<std::uint64_t> seed;
};

void apply_seed(Scenario& s, const std::optional<std::uint64_t>& seed) {
  if (!seed) return;
  s.policy_cfg.rng_seed = *seed;
  if (s.trace_spec) s.trace_spec->seed = *seed;
}

void append_results_csv(const fs::path& dir, const SweepRow& row) {
  const fs::path path = dir / "results.csv";
  const bool fresh = !fs::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot open " + path.string());
  if (fresh) write_csv_header(out);
  write_csv_row(out, row);
}

void dump_histogram_csv(const fs::path& path, const HistogramSnapshot& snap) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string());
  out << "slot,count\n";
  for (int i = 0; i < kSubpagesPerThp; ++i) {
    out << i << ',' << snap.counts[i] << '\n';
  }
}

int cmd_run(const CommonOpts& opts, const std::string& dump_histogram) {
  Scenario s = load_scenario(opts.config);
  apply_seed(s, opts.seed);
  const auto events = scenario_trace(s);

  std::ofstream event_log;
  if (!opts.event_log.empty()) {
    event_log.open(opts.event_log);
    if (!event_log) throw Error("cannot open event log " + opts.event_log);
  }

  HistogramSnapshot hist;
  SweepRow row;
  row.scenario = s.name;
  row.policy = s.policy;
  row.contention_pct = s.contention_pct;
  row.seed = s.policy_cfg.rng_seed;
  row.report = run_one(s, events, event_log.is_open() ? &event_log : nullptr,
                       dump_histogram.empty() ? nullptr : &hist);

  fs::create_directories(opts.out_dir);
  const fs::path report_path = fs::path(opts.out_dir) / (s.name + ".report.json");
  std::ofstream rj(report_path);
  if (!rj) throw Error("cannot open " + report_path.string());
  rj << report_json(row) << '\n';
  append_results_csv(opts.out_dir, row);
  if (!dump_histogram.empty()) dump_histogram_csv(dump_histogram, hist);

  log_info("wrote " + report_path.string());
  return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::string& levels_arg) {
  Scenario s = load_scenario(opts.config);
  apply_seed(s, opts.seed);

  std::vector<double> levels;
  std::stringstream ss(levels_arg);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    double level = 0.0;
    try {
      level = std::stod(tok);
    } catch (const std::exception&) {
      throw ConfigError("bad contention level '" + tok + "'");
    }
    if (level < 0.0) throw ConfigError("contention levels must be >= 0");
    levels.push_back(level);
  }
  if (levels.empty()) throw ConfigError("no contention levels given");

  const auto rows = run_sweep(s, levels);

  fs::create_directories(opts.out_dir);
  const fs::path path = fs::path(opts.out_dir) / "results.csv";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string());
  write_csv_header(out);
  for (const auto& row : rows) write_csv_row(out, row);
  log_info("wrote " + path.string() + " (" + std::to_string(rows.size()) + " rows)");
  return 0;
}

int cmd_gen_trace(const TraceSpec& spec, const std::string& out_path) {
  const auto events = generate(spec);
  write_trace(out_path, events);
  log_info("wrote " + out_path + " (" + std::to_string(events.size()) + " events)");
  return 0;
}

HistogramSnapshot read_histogram_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open histogram csv: " + path);
  HistogramSnapshot snap;
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("malformed csv row: " + line);
    int slot;
    std::uint64_t count;
    try {
      slot = std::stoi(line.substr(0, comma));
      count = std::stoull(line.substr(comma + 1));
    } catch (const std::exception&) {
      if (rows == 0) continue;  // header line
      throw ConfigError("malformed csv row: " + line);
    }
    if (slot < 0 || slot >= kSubpagesPerThp) {
      throw ConfigError("slot out of range in csv: " + line);
    }
    snap.counts[slot] = count;
    snap.total += count;
    ++rows;
  }
  if (rows != kSubpagesPerThp) {
    throw ConfigError("expected 512 histogram rows, got " + std::to_string(rows));
  }
  return snap;
}

int cmd_split_analyze(const std::string& csv_path, const std::string& config,
                      int fault_subpage) {
  PolicyConfig cfg;
  if (!config.empty()) cfg = load_policy_config(config);
  if (fault_subpage < 0 || fault_subpage >= kSubpagesPerThp) {
    throw ConfigError("--fault must be in [0, 512)");
  }
  const HistogramSnapshot snap = read_histogram_csv(csv_path);
  const SplitDecision d = decide_split(snap, cfg, fault_subpage);
  std::cout << split_decision_json(d) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic tiered-memory page-migration simulator"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string levels = "0,25,50,100";
  std::string dump_histogram;

  auto* run = app.add_subcommand("run", "Run one scenario and emit its report");
  run->add_option("--config", opts.config, "Scenario JSON")->required();
  run->add_option("--seed", opts.seed, "Override the configured seed");
  run->add_option("--event-log", opts.event_log, "Write per-fault NDJSON here");
  run->add_option("--out-dir", opts.out_dir, "Output directory");
  run->add_option("--dump-histogram", dump_histogram,
                  "Write the final subpage histogram as CSV");

  auto* sweep = app.add_subcommand("sweep", "Run (policy x contention) grid");
  sweep->add_option("--config", opts.config, "Scenario JSON")->required();
  sweep->add_option("--contention", levels, "Comma-separated percent levels");
  sweep->add_option("--seed", opts.seed, "Override the configured seed");
  sweep->add_option("--out-dir", opts.out_dir, "Output directory");

  TraceSpec spec;
  std::string kind = "uniform";
  std::string trace_out = "trace.bin";
  double region_mb = 2.0;
  double block_kb = 512.0;
  auto* gen = app.add_subcommand("gen-trace", "Generate a synthetic trace file");
  gen->add_option("--kind", kind, "uniform|zipfian|hotblocks|strided");
  gen->add_option("--events", spec.n_events, "Number of access events")->required();
  gen->add_option("--region-mb", region_mb, "Region size in MB (multiple of 2)");
  gen->add_option("--write-frac", spec.write_fraction, "Write fraction");
  gen->add_option("--seed", spec.seed, "Generator seed");
  gen->add_option("--zipf-s", spec.zipf_s, "Zipf exponent");
  gen->add_option("--block-kb", block_kb, "HotBlocks window size in KB");
  gen->add_option("--hot-frac", spec.hot_fraction, "Fraction of hot regions");
  gen->add_option("--hot-weight", spec.hot_weight, "Access weight of the window");
  gen->add_option("--stride", spec.stride, "Stride in bytes");
  gen->add_option("--out", trace_out, "Output path");

  std::string csv_path;
  std::string policy_config;
  int fault_subpage = 0;
  auto* analyze = app.add_subcommand(
      "split-analyze", "Print the split decision for a histogram CSV");
  analyze->add_option("csv", csv_path, "512-row slot,count CSV")->required();
  analyze->add_option("--config", policy_config, "PolicyConfig JSON");
  analyze->add_option("--fault", fault_subpage, "Faulting subpage index");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (run->parsed()) return cmd_run(opts, dump_histogram);
    if (sweep->parsed()) return cmd_sweep(opts, levels);
    if (gen->parsed()) {
      spec.kind = trace_kind_from_string(kind);
      spec.region_bytes = static_cast<std::uint64_t>(region_mb * 1024.0 * 1024.0);
      spec.block_bytes = static_cast<std::uint64_t>(block_kb * 1024.0);
      return cmd_gen_trace(spec, trace_out);
    }
    if (analyze->parsed()) {
      return cmd_split_analyze(csv_path, policy_config, fault_subpage);
    }
  } catch (const ConfigError& e) {
    log_error(e.what());
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const InvalidSpec& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
