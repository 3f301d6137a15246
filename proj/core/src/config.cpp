#include "tiersim/config.hpp"

#include <fstream>
#include <sstream>

#include "json_support.hpp"
#include "tiersim/errors.hpp"

namespace tiersim {

std::string to_string(DuplexMode mode) {
  return mode == DuplexMode::FullDuplex ? "FullDuplex" : "HalfDuplex";
}

DuplexMode duplex_from_string(const std::string& s) {
  if (s == "FullDuplex") return DuplexMode::FullDuplex;
  if (s == "HalfDuplex") return DuplexMode::HalfDuplex;
  throw ConfigError("duplex_mode must be FullDuplex or HalfDuplex, got '" + s + "'");
}

namespace {

void require_unit_fraction(double v, const char* name, bool zero_ok) {
  if (!(v >= 0.0 && v <= 1.0) || (!zero_ok && v == 0.0)) {
    throw ConfigError(std::string(name) + " out of range: " + std::to_string(v));
  }
}

}  // namespace

void validate(const PolicyConfig& cfg) {
  require_unit_fraction(cfg.coverage_p, "coverage_P", false);
  require_unit_fraction(cfg.tau_h, "tau_h", false);
  require_unit_fraction(cfg.entropy_gate, "entropy_gate", false);
  require_unit_fraction(cfg.contention_gate, "contention_gate", false);
  require_unit_fraction(cfg.traffic_theta, "traffic_theta", false);
  require_unit_fraction(cfg.sample_prob, "sample_prob", true);
  require_unit_fraction(cfg.write_heavy_cut, "write_heavy_cut", true);
  if (cfg.tlb_entries <= 0) throw ConfigError("tlb_entries must be positive");
}

namespace detail {

PolicyConfig policy_config_from_json(const nlohmann::json& j) {
  PolicyConfig cfg;
  try {
    read_field(j, "coverage_P", cfg.coverage_p);
    read_field(j, "tau_h", cfg.tau_h);
    read_field(j, "entropy_gate", cfg.entropy_gate);
    read_field(j, "sample_prob", cfg.sample_prob);
    read_field(j, "contention_gate", cfg.contention_gate);
    read_field(j, "traffic_theta", cfg.traffic_theta);
    read_field(j, "write_heavy_cut", cfg.write_heavy_cut);
    read_field(j, "tlb_entries", cfg.tlb_entries);
    read_field(j, "rng_seed", cfg.rng_seed);
    if (j.contains("duplex_mode")) {
      cfg.duplex_mode = duplex_from_string(j.at("duplex_mode").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad policy config field: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

}  // namespace detail

PolicyConfig parse_policy_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("policy config is not valid JSON: ") + e.what());
  }
  return detail::policy_config_from_json(j);
}

PolicyConfig load_policy_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open policy config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_policy_config(buf.str());
}

}  // namespace tiersim
