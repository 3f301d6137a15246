#pragma once

#include <cstdint>
#include <list>
#include <unordered_map>

namespace tiersim {

/// TLB proxy: an LRU set of folio ids. One entry covers one folio whatever
/// its order, so larger folios stretch the reach of the same entry count.
class TlbModel {
 public:
  explicit TlbModel(std::size_t capacity) : capacity_(capacity) {}

  /// Returns true on hit. Misses insert the folio, evicting the LRU entry
  /// when the set is full.
  bool access(std::uint64_t folio_id) {
    auto it = pos_.find(folio_id);
    if (it != pos_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      ++hits_;
      return true;
    }
    ++misses_;
    lru_.push_front(folio_id);
    pos_[folio_id] = lru_.begin();
    if (lru_.size() > capacity_) {
      pos_.erase(lru_.back());
      lru_.pop_back();
    }
    return false;
  }

  /// Drops the entry for a folio that no longer exists (split away).
  void invalidate(std::uint64_t folio_id) {
    auto it = pos_.find(folio_id);
    if (it == pos_.end()) return;
    lru_.erase(it->second);
    pos_.erase(it);
  }

  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }
  std::size_t size() const { return lru_.size(); }

 private:
  std::size_t capacity_;
  std::list<std::uint64_t> lru_;  // front = most recent
  std::unordered_map<std::uint64_t, std::list<std::uint64_t>::iterator> pos_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

}  // namespace tiersim
