#include "tiersim/admission.hpp"

#include "tiersim/errors.hpp"

namespace tiersim {

TrafficWindow::TrafficWindow(int buckets) : capacity_(buckets) {
  if (buckets <= 0) throw InvalidSpec("traffic window needs at least one bucket");
  ring_.emplace_back();
}

void TrafficWindow::add(std::uint64_t read_bytes, std::uint64_t write_bytes) {
  ring_.back().read += read_bytes;
  ring_.back().write += write_bytes;
}

void TrafficWindow::rotate() {
  ring_.emplace_back();
  while (static_cast<int>(ring_.size()) > capacity_) ring_.pop_front();
}

std::uint64_t TrafficWindow::read_total() const {
  std::uint64_t sum = 0;
  for (const auto& b : ring_) sum += b.read;
  return sum;
}

std::uint64_t TrafficWindow::write_total() const {
  std::uint64_t sum = 0;
  for (const auto& b : ring_) sum += b.write;
  return sum;
}

std::string to_string(Verdict v) {
  return v == Verdict::Allow ? "allow" : "prevent";
}

std::string to_string(RwClass c) {
  return c == RwClass::ReadHeavy ? "read_heavy" : "write_heavy";
}

std::string to_string(TrafficClass c) {
  switch (c) {
    case TrafficClass::ReadDominant: return "read_dominant";
    case TrafficClass::Balanced: return "balanced";
    case TrafficClass::WriteDominant: return "write_dominant";
  }
  return "?";
}

TrafficClass classify_traffic(const TrafficWindow& w, double theta) {
  const std::uint64_t reads = w.read_total();
  const std::uint64_t writes = w.write_total();
  if (reads + writes == 0) return TrafficClass::Balanced;
  const double r_share =
      static_cast<double>(reads) / static_cast<double>(reads + writes);
  if (r_share >= theta) return TrafficClass::ReadDominant;
  if (r_share <= 1.0 - theta) return TrafficClass::WriteDominant;
  return TrafficClass::Balanced;
}

RwClass classify_page(const DualBcbf& sketch, Address page_addr, double cut) {
  return sketch.write_ratio(page_addr) >= cut ? RwClass::WriteHeavy
                                              : RwClass::ReadHeavy;
}

Verdict admit(RwClass page_class, TrafficClass traffic, DuplexMode duplex) {
  if (duplex == DuplexMode::HalfDuplex) return Verdict::Allow;
  if (page_class == RwClass::ReadHeavy) {
    return traffic == TrafficClass::WriteDominant ? Verdict::Prevent
                                                  : Verdict::Allow;
  }
  return traffic == TrafficClass::ReadDominant ? Verdict::Prevent
                                               : Verdict::Allow;
}

}  // namespace tiersim
