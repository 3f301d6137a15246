#include "doctest.h"

#include "tiersim/config.hpp"
#include "tiersim/errors.hpp"
#include "tiersim/rng.hpp"
#include "tiersim/types.hpp"

using namespace tiersim;

TEST_CASE("subpage_index maps offsets within the 2MB region") {
  CHECK(subpage_index(0) == 0);
  CHECK(subpage_index(0x1F'F000) == 511);  // 2 MB - 4 KB
  CHECK(subpage_index(0x20'4000) == 4);    // 2 MB + 16 KB
}

TEST_CASE("subpage_index is periodic with period 2MB") {
  SplitMix64 rng(99);
  for (int i = 0; i < 1000; ++i) {
    const Address a = rng.next();
    CHECK(subpage_index(a) == subpage_index(a + kThpBytes));
    CHECK(subpage_index(a) < 512);
  }
}

TEST_CASE("folio order size arithmetic") {
  for (int order : {0, 4, 5, 6, 7, 8, 9}) {
    CHECK(valid_folio_order(order));
    CHECK(order_bytes(order) == (4096ull << order));
    CHECK(order_subpages(order) == (1 << order));
  }
  CHECK(order_bytes(kOrder2M) == kThpBytes);
  CHECK_FALSE(valid_folio_order(1));
  CHECK_FALSE(valid_folio_order(10));
  CHECK_FALSE(valid_folio_order(-1));
}

TEST_CASE("policy config JSON round-trip and validation") {
  const PolicyConfig cfg = parse_policy_config(R"({
    "coverage_P": 0.7,
    "tau_h": 0.6,
    "entropy_gate": 0.9,
    "sample_prob": 0.02,
    "contention_gate": 0.4,
    "traffic_theta": 0.8,
    "write_heavy_cut": 0.55,
    "duplex_mode": "HalfDuplex",
    "tlb_entries": 64,
    "rng_seed": 1234
  })");
  CHECK(cfg.coverage_p == doctest::Approx(0.7));
  CHECK(cfg.tau_h == doctest::Approx(0.6));
  CHECK(cfg.duplex_mode == DuplexMode::HalfDuplex);
  CHECK(cfg.tlb_entries == 64);
  CHECK(cfg.rng_seed == 1234);

  SUBCASE("missing keys keep defaults") {
    const PolicyConfig d = parse_policy_config("{}");
    CHECK(d.coverage_p == doctest::Approx(0.80));
    CHECK(d.tau_h == doctest::Approx(0.75));
    CHECK(d.entropy_gate == doctest::Approx(0.95));
    CHECK(d.tlb_entries == 1536);
  }
  SUBCASE("out-of-range fractions are rejected") {
    CHECK_THROWS_AS(parse_policy_config(R"({"coverage_P": 0.0})"), ConfigError);
    CHECK_THROWS_AS(parse_policy_config(R"({"tau_h": 1.5})"), ConfigError);
    CHECK_THROWS_AS(parse_policy_config(R"({"duplex_mode": "Both"})"), ConfigError);
    CHECK_THROWS_AS(parse_policy_config("not json"), ConfigError);
  }
}
