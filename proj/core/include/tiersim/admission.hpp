#pragma once

#include <cstdint>
#include <deque>
#include <string>

#include "tiersim/rwsketch.hpp"
#include "tiersim/types.hpp"

namespace tiersim {

/// Sliding window of recent slow-tier traffic, one (read, write) byte pair
/// per simulated epoch. The newest bucket accumulates until rotate() seals
/// it and evicts anything older than the window width.
class TrafficWindow {
 public:
  explicit TrafficWindow(int buckets = 8);

  void add(std::uint64_t read_bytes, std::uint64_t write_bytes);
  void rotate();

  std::uint64_t read_total() const;
  std::uint64_t write_total() const;

 private:
  struct Bucket {
    std::uint64_t read = 0;
    std::uint64_t write = 0;
  };
  std::deque<Bucket> ring_;
  int capacity_;
};

enum class Verdict { Allow, Prevent };

std::string to_string(Verdict v);
std::string to_string(RwClass c);
std::string to_string(TrafficClass c);

/// Read share of the window against theta: >= theta is read-dominant,
/// <= 1 - theta is write-dominant, anything else (including an empty
/// window) is balanced.
TrafficClass classify_traffic(const TrafficWindow& w, double theta);

/// WriteHeavy iff write_ratio >= cut. Unseen pages have ratio 0 and come
/// out ReadHeavy.
RwClass classify_page(const DualBcbf& sketch, Address page_addr, double cut);

/// Duplex-aware admission. Half-duplex memory gains nothing from traffic
/// rebalancing, so the check is a pass-through there. Full-duplex: admit
/// pages whose class matches the dominant traffic direction, hold back the
/// rest; balanced traffic admits everything.
Verdict admit(RwClass page_class, TrafficClass traffic, DuplexMode duplex);

}  // namespace tiersim
