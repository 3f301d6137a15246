#include "tiersim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "tiersim/errors.hpp"
#include "tiersim/rng.hpp"

namespace tiersim {

std::string to_string(TraceKind k) {
  switch (k) {
    case TraceKind::Uniform: return "uniform";
    case TraceKind::Zipfian: return "zipfian";
    case TraceKind::HotBlocks: return "hotblocks";
    case TraceKind::Strided: return "strided";
  }
  return "?";
}

TraceKind trace_kind_from_string(const std::string& s) {
  if (s == "uniform") return TraceKind::Uniform;
  if (s == "zipfian") return TraceKind::Zipfian;
  if (s == "hotblocks") return TraceKind::HotBlocks;
  if (s == "strided") return TraceKind::Strided;
  throw InvalidSpec("unknown trace kind '" + s + "'");
}

void validate(const TraceSpec& spec) {
  if (spec.region_bytes == 0 || spec.region_bytes % kThpBytes != 0) {
    throw InvalidSpec("region_bytes must be a positive multiple of 2 MB");
  }
  if (spec.write_fraction < 0.0 || spec.write_fraction > 1.0) {
    throw InvalidSpec("write_fraction must be in [0, 1]");
  }
  if (spec.kind == TraceKind::Zipfian && spec.zipf_s <= 0.0) {
    throw InvalidSpec("zipf_s must be positive");
  }
  if (spec.kind == TraceKind::HotBlocks) {
    if (spec.block_bytes == 0 || spec.block_bytes % kPageBytes != 0 ||
        spec.block_bytes > kThpBytes || kThpBytes % spec.block_bytes != 0) {
      throw InvalidSpec("block_bytes must evenly divide 2 MB");
    }
    if (spec.hot_fraction < 0.0 || spec.hot_fraction > 1.0 ||
        spec.hot_weight < 0.0 || spec.hot_weight > 1.0) {
      throw InvalidSpec("hot_fraction and hot_weight must be in [0, 1]");
    }
  }
  if (spec.kind == TraceKind::Strided && spec.stride == 0) {
    throw InvalidSpec("stride must be positive");
  }
}

namespace {

// Cumulative Zipf table over page ranks; sampling is one binary search.
class ZipfSampler {
 public:
  ZipfSampler(std::uint64_t n, double s) : cdf_(n) {
    double acc = 0.0;
    for (std::uint64_t r = 0; r < n; ++r) {
      acc += 1.0 / std::pow(static_cast<double>(r + 1), s);
      cdf_[r] = acc;
    }
    for (auto& v : cdf_) v /= acc;
  }

  std::uint64_t rank(double u) const {
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<std::uint64_t>(it - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

}  // namespace

std::vector<AccessEvent> generate(const TraceSpec& spec) {
  validate(spec);
  SplitMix64 rng(spec.seed);
  std::vector<AccessEvent> events;
  events.reserve(spec.n_events);

  const std::uint64_t regions = spec.region_bytes / kThpBytes;
  const std::uint64_t pages = spec.region_bytes / kPageBytes;

  switch (spec.kind) {
    case TraceKind::Uniform: {
      for (std::uint64_t i = 0; i < spec.n_events; ++i) {
        const Address v = rng.next_below(spec.region_bytes);
        const bool w = rng.next_unit() < spec.write_fraction;
        events.push_back({i, v, w});
      }
      break;
    }
    case TraceKind::Zipfian: {
      const ZipfSampler zipf(pages, spec.zipf_s);
      for (std::uint64_t i = 0; i < spec.n_events; ++i) {
        const std::uint64_t r = zipf.rank(rng.next_unit());
        // Offset-major placement: rank r lives in region (r % regions) at
        // subpage offset (r / regions).
        const std::uint64_t region = r % regions;
        const std::uint64_t offset = r / regions;
        const Address page_base = region * kThpBytes + offset * kPageBytes;
        const Address v = page_base + rng.next_below(kPageBytes);
        const bool w = rng.next_unit() < spec.write_fraction;
        events.push_back({i, v, w});
      }
      break;
    }
    case TraceKind::HotBlocks: {
      const std::uint64_t windows_per_region = kThpBytes / spec.block_bytes;
      const std::uint64_t window =
          mix64(spec.seed ^ 0x686f74ULL) % windows_per_region;
      const std::uint64_t hot_regions = static_cast<std::uint64_t>(
          std::llround(spec.hot_fraction * static_cast<double>(regions)));
      for (std::uint64_t i = 0; i < spec.n_events; ++i) {
        const std::uint64_t region = rng.next_below(regions);
        Address v;
        if (region < hot_regions && rng.next_unit() < spec.hot_weight) {
          const Address base = region * kThpBytes + window * spec.block_bytes;
          v = base + rng.next_below(spec.block_bytes);
        } else {
          v = region * kThpBytes + rng.next_below(kThpBytes);
        }
        const bool w = rng.next_unit() < spec.write_fraction;
        events.push_back({i, v, w});
      }
      break;
    }
    case TraceKind::Strided: {
      for (std::uint64_t i = 0; i < spec.n_events; ++i) {
        const Address v = (i * spec.stride) % spec.region_bytes;
        const bool w = rng.next_unit() < spec.write_fraction;
        events.push_back({i, v, w});
      }
      break;
    }
  }
  return events;
}

namespace {

constexpr std::uint64_t kVaddrMask = (1ull << 56) - 1;

void put_u64(std::uint8_t* out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint64_t get_u64(const std::uint8_t* in, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  return v;
}

}  // namespace

void write_trace(const std::string& path, const std::vector<AccessEvent>& events) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open trace file for writing: " + path);
  out.write(kTraceMagic, sizeof(kTraceMagic));
  std::uint8_t rec[16];
  for (const AccessEvent& ev : events) {
    put_u64(rec, ev.tick, 8);
    put_u64(rec + 8, ev.vaddr & kVaddrMask, 7);
    rec[15] = ev.is_write ? 1 : 0;
    out.write(reinterpret_cast<const char*>(rec), sizeof(rec));
  }
  if (!out) throw Error("short write on trace file: " + path);
}

std::vector<AccessEvent> read_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TruncatedFile("cannot open trace file: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic)) {
    throw TruncatedFile("trace file shorter than its magic: " + path);
  }
  if (std::memcmp(magic, kTraceMagic, sizeof(magic)) != 0) throw BadMagic();

  std::vector<AccessEvent> events;
  std::uint8_t rec[16];
  while (true) {
    in.read(reinterpret_cast<char*>(rec), sizeof(rec));
    const auto got = in.gcount();
    if (got == 0) break;
    if (got != sizeof(rec)) {
      throw TruncatedFile("trace file ends mid-record: " + path);
    }
    AccessEvent ev;
    ev.tick = get_u64(rec, 8);
    ev.vaddr = get_u64(rec + 8, 7);
    ev.is_write = (rec[15] & 1) != 0;
    events.push_back(ev);
  }
  return events;
}

}  // namespace tiersim
