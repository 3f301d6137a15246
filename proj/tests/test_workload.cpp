#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "doctest.h"

#include "tiersim/errors.hpp"
#include "tiersim/rng.hpp"
#include "tiersim/workload.hpp"

using namespace tiersim;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
  return fs::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("uniform events stay inside the region") {
  TraceSpec spec{.kind = TraceKind::Uniform,
                 .n_events = 512,
                 .region_bytes = kThpBytes,
                 .seed = 4};
  for (const auto& ev : generate(spec)) CHECK(ev.vaddr < kThpBytes);
}

TEST_CASE("generation is deterministic in the seed") {
  TraceSpec spec{.kind = TraceKind::HotBlocks,
                 .n_events = 5000,
                 .region_bytes = 8 * kThpBytes,
                 .write_fraction = 0.3,
                 .seed = 77};
  CHECK(generate(spec) == generate(spec));
  spec.seed = 78;
  CHECK(generate(spec) != generate(TraceSpec{.kind = TraceKind::HotBlocks,
                                             .n_events = 5000,
                                             .region_bytes = 8 * kThpBytes,
                                             .write_fraction = 0.3,
                                             .seed = 77}));
}

TEST_CASE("hotblocks concentrates weight in one window per region") {
  TraceSpec spec{.kind = TraceKind::HotBlocks,
                 .n_events = 100000,
                 .region_bytes = 16 * kThpBytes,
                 .seed = 12,
                 .block_bytes = 512 * 1024,
                 .hot_fraction = 1.0,
                 .hot_weight = 0.9};
  const auto events = generate(spec);

  // Recover the shared window from the subpage histogram of region 0.
  std::map<Address, std::uint64_t> per_region_hits;
  std::map<Address, std::uint64_t> per_region_window_hits;
  const std::uint64_t window_subpages = spec.block_bytes / kPageBytes;
  // Find the dominant window offset first.
  std::map<std::uint64_t, std::uint64_t> window_votes;
  for (const auto& ev : events) {
    window_votes[subpage_index(ev.vaddr) / window_subpages]++;
  }
  std::uint64_t window = 0, best = 0;
  for (const auto& [w, n] : window_votes) {
    if (n > best) {
      best = n;
      window = w;
    }
  }
  for (const auto& ev : events) {
    const Address region = ev.vaddr / kThpBytes;
    per_region_hits[region]++;
    if (subpage_index(ev.vaddr) / window_subpages == window) {
      per_region_window_hits[region]++;
    }
  }
  CHECK(per_region_hits.size() == 16);
  for (const auto& [region, hits] : per_region_hits) {
    const double share = static_cast<double>(per_region_window_hits[region]) /
                         static_cast<double>(hits);
    // 90% nominal; 85% leaves room for the uniform share and sampling noise.
    CHECK(share >= 0.85);
  }
}

TEST_CASE("zipfian rank-frequency is monotone over the top ranks") {
  TraceSpec spec{.kind = TraceKind::Zipfian,
                 .n_events = 1000000,
                 .region_bytes = 32 * kThpBytes,
                 .seed = 21,
                 .zipf_s = 0.99};
  const auto events = generate(spec);
  const std::uint64_t regions = spec.region_bytes / kThpBytes;
  std::map<std::uint64_t, std::uint64_t> page_hits;
  for (const auto& ev : events) page_hits[ev.vaddr / kPageBytes]++;

  auto hits_of_rank = [&](std::uint64_t r) {
    const std::uint64_t region = r % regions;
    const std::uint64_t offset = r / regions;
    const std::uint64_t page = region * 512 + offset;
    return page_hits.count(page) ? page_hits.at(page) : 0;
  };
  for (std::uint64_t r = 0; r + 1 < 16; ++r) {
    CHECK(hits_of_rank(r) >= hits_of_rank(r + 1));
  }
}

TEST_CASE("trace codec round-trips") {
  const auto path = temp_file("tiersim_roundtrip.trc");
  SUBCASE("empty trace is just the magic") {
    write_trace(path.string(), {});
    CHECK(fs::file_size(path) == 8);
    CHECK(read_trace(path.string()).empty());
  }
  SUBCASE("three events take 56 bytes") {
    const std::vector<AccessEvent> events{
        {0, 0x1000, false}, {1, 0x2000, true}, {5, 0xfffff, false}};
    write_trace(path.string(), events);
    CHECK(fs::file_size(path) == 8 + 3 * 16);
    CHECK(read_trace(path.string()) == events);
  }
  SUBCASE("random traces round-trip") {
    SplitMix64 rng(31);
    for (int t = 0; t < 100; ++t) {
      std::vector<AccessEvent> events;
      const int n = static_cast<int>(rng.next_below(200));
      std::uint64_t tick = 0;
      for (int i = 0; i < n; ++i) {
        tick += rng.next_below(3);
        events.push_back({tick, rng.next() & ((1ull << 56) - 1),
                          (rng.next() & 1) != 0});
      }
      write_trace(path.string(), events);
      CHECK(read_trace(path.string()) == events);
    }
  }
  fs::remove(path);
}

TEST_CASE("trace codec rejects damaged files") {
  const auto path = temp_file("tiersim_damaged.trc");
  SUBCASE("bad magic") {
    std::ofstream out(path, std::ios::binary);
    out << "NOTATRACE";
    out.close();
    CHECK_THROWS_AS(read_trace(path.string()), BadMagic);
  }
  SUBCASE("mid-record truncation") {
    write_trace(path.string(), {{0, 0x1000, false}});
    fs::resize_file(path, 8 + 7);
    CHECK_THROWS_AS(read_trace(path.string()), TruncatedFile);
  }
  SUBCASE("shorter than the magic") {
    std::ofstream out(path, std::ios::binary);
    out << "TSI";
    out.close();
    CHECK_THROWS_AS(read_trace(path.string()), TruncatedFile);
  }
  fs::remove(path);
}

TEST_CASE("spec validation") {
  TraceSpec spec;
  spec.region_bytes = kThpBytes + 1;
  CHECK_THROWS_AS(validate(spec), InvalidSpec);
  spec.region_bytes = kThpBytes;
  spec.write_fraction = 1.5;
  CHECK_THROWS_AS(validate(spec), InvalidSpec);
  spec.write_fraction = 0.5;
  spec.kind = TraceKind::HotBlocks;
  spec.block_bytes = 3000;
  CHECK_THROWS_AS(validate(spec), InvalidSpec);
  CHECK_THROWS_AS(trace_kind_from_string("nope"), InvalidSpec);
}
