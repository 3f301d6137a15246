#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tiersim/types.hpp"

namespace tiersim {

enum class TraceKind { Uniform, Zipfian, HotBlocks, Strided };

std::string to_string(TraceKind k);
TraceKind trace_kind_from_string(const std::string& s);

/// Synthetic trace description. region_bytes must be a multiple of 2 MB.
///
/// HotBlocks places one aligned window of block_bytes inside each hot 2 MB
/// region (the first hot_fraction of regions); the window sits at the same
/// seed-derived offset in every region and draws hot_weight of that region's
/// accesses. Zipfian ranks map to 4 KB pages offset-major: the top ranks
/// occupy the first subpage of every region, the next ranks the second
/// subpage, and so on, which preserves rank order per page while giving
/// every region the same intra-region skew.
struct TraceSpec {
  TraceKind kind = TraceKind::Uniform;
  std::uint64_t n_events = 0;
  std::uint64_t region_bytes = kThpBytes;
  double write_fraction = 0.0;
  std::uint64_t seed = 1;
  // Zipfian
  double zipf_s = 0.99;
  // HotBlocks
  std::uint64_t block_bytes = 512 * 1024;
  double hot_fraction = 1.0;
  double hot_weight = 0.9;
  // Strided
  std::uint64_t stride = kPageBytes;
};

void validate(const TraceSpec& spec);

std::vector<AccessEvent> generate(const TraceSpec& spec);

/// Binary trace file: 8-byte magic "TSIMTRC1", then 16-byte little-endian
/// records (tick u64, vaddr u56, flags u8 with bit 0 = is_write).
void write_trace(const std::string& path, const std::vector<AccessEvent>& events);
std::vector<AccessEvent> read_trace(const std::string& path);

inline constexpr char kTraceMagic[8] = {'T', 'S', 'I', 'M', 'T', 'R', 'C', '1'};

}  // namespace tiersim
