#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <list>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "memocheck/store.hpp"

namespace memocheck {

/// Automaton state id, or kGroundType for ground/1.
using TypeId = std::uint32_t;
inline constexpr TypeId kGroundType = 0xfffffffeu;
inline constexpr std::uint32_t kUnlimitedDepth = std::numeric_limits<std::uint32_t>::max();

enum class CachePolicy { None, Lru, DirectMapped };
enum class Invalidation { FlushAll, TrailSelective };

inline std::string to_string(CachePolicy p) {
  switch (p) {
    case CachePolicy::None: return "none";
    case CachePolicy::Lru: return "lru";
    case CachePolicy::DirectMapped: return "dm";
  }
  return "?";
}
inline std::string to_string(Invalidation i) {
  return i == Invalidation::FlushAll ? "flush" : "trail";
}
inline std::string depth_text(std::uint32_t d) {
  return d == kUnlimitedDepth ? "inf" : std::to_string(d);
}

struct CacheConfig {
  CachePolicy policy = CachePolicy::Lru;
  std::size_t capacity = 256;
  std::uint32_t depth_limit = 2;
  Invalidation invalidation = Invalidation::FlushAll;
  // Testing aid: forget everything with this probability at every lookup.
  double chaos_flush_probability = 0.0;
  std::uint64_t chaos_seed = 0;

  std::string describe() const {
    if (policy == CachePolicy::None || capacity == 0) return "none";
    std::string s = to_string(policy) + "-" + std::to_string(capacity) + "/d" +
                    depth_text(depth_limit) + "/" + to_string(invalidation);
    if (chaos_flush_probability > 0) s += "/chaos";
    return s;
  }
};

struct CacheKey {
  NodeId node;
  TypeId type;
  friend bool operator==(const CacheKey&, const CacheKey&) = default;
  friend auto operator<=>(const CacheKey&, const CacheKey&) = default;
};

struct CacheKeyHash {
  std::size_t operator()(const CacheKey& k) const {
    return (static_cast<std::size_t>(k.node) << 20) ^ k.type;
  }
};

struct CacheStats {
  std::uint64_t lookups = 0;
  std::uint64_t hits = 0;
  std::uint64_t insertions = 0;
  std::uint64_t evictions = 0;
  std::uint64_t flushes = 0;
  std::uint64_t node_visits = 0;
  std::uint32_t max_check_depth = 0;
  std::vector<std::uint64_t> depth_histogram;  // index: max depth reached by one check

  void record_check_depth(std::uint32_t d) {
    max_check_depth = std::max(max_check_depth, d);
    if (depth_histogram.size() <= d) depth_histogram.resize(d + 1, 0);
    ++depth_histogram[d];
  }

  /// Flat `key=value` block.
  std::string to_text() const {
    return "lookups=" + std::to_string(lookups) + "\nhits=" + std::to_string(hits) +
           "\ninsertions=" + std::to_string(insertions) + "\nevictions=" + std::to_string(evictions) +
           "\nflushes=" + std::to_string(flushes) + "\nnode_visits=" + std::to_string(node_visits) +
           "\nmax_check_depth=" + std::to_string(max_check_depth) + "\n";
  }
};

/// The bounded store of verified (node, type) facts. An entry records the
/// binding-trail watermark it relied on: one past the highest trail position
/// of any binding dereferenced while verifying it (0 if none).
class CheckCache {
 public:
  struct Entry {
    CacheKey key;
    std::uint32_t watermark;
  };

  explicit CheckCache(CacheConfig cfg = {}) : cfg_(cfg), rng_(cfg.chaos_seed) {
    if (cfg_.policy == CachePolicy::DirectMapped && cfg_.capacity > 0) slots_.resize(cfg_.capacity);
  }

  const CacheConfig& config() const { return cfg_; }
  bool enabled() const { return cfg_.policy != CachePolicy::None && cfg_.capacity > 0; }
  CacheStats& stats() { return stats_; }
  const CacheStats& stats() const { return stats_; }

  /// Hit returns the entry's watermark; LRU promotes the entry to most recent.
  std::optional<std::uint32_t> lookup(NodeId node, TypeId type) {
    ++stats_.lookups;
    if (!enabled()) return std::nullopt;
    maybe_chaos();
    CacheKey k{node, type};
    if (cfg_.policy == CachePolicy::Lru) {
      auto it = lru_index_.find(k);
      if (it == lru_index_.end()) return std::nullopt;
      lru_.splice(lru_.begin(), lru_, it->second);
      ++stats_.hits;
      return it->second->watermark;
    }
    auto& slot = slots_[node % cfg_.capacity];
    if (slot && slot->key == k) {
      ++stats_.hits;
      return slot->watermark;
    }
    return std::nullopt;
  }

  /// Records a just-verified fact found at recursion depth `depth`. Facts at
  /// or beyond the depth limit are not cached.
  void insert(NodeId node, TypeId type, std::uint32_t depth, std::uint32_t watermark) {
    if (!enabled() || depth >= cfg_.depth_limit) return;
    CacheKey k{node, type};
    ++stats_.insertions;
    if (cfg_.policy == CachePolicy::Lru) {
      if (auto it = lru_index_.find(k); it != lru_index_.end()) {
        it->second->watermark = watermark;
        lru_.splice(lru_.begin(), lru_, it->second);
        return;
      }
      lru_.push_front({k, watermark});
      lru_index_.emplace(k, lru_.begin());
      if (lru_.size() > cfg_.capacity) {
        lru_index_.erase(lru_.back().key);
        lru_.pop_back();
        ++stats_.evictions;
      }
      return;
    }
    auto& slot = slots_[node % cfg_.capacity];
    if (slot && !(slot->key == k)) ++stats_.evictions;
    else if (!slot) ++occupied_;
    slot = Entry{k, watermark};
  }

  /// Backtracking hook. Flush-all empties the cache when any binding was
  /// undone; trail-selective drops exactly the entries that depended on an
  /// undone binding.
  void invalidate(const UndoEvent& ev) {
    if (!enabled() || ev.unbound.empty() || size() == 0) return;
    if (cfg_.invalidation == Invalidation::FlushAll) {
      flush();
      return;
    }
    std::size_t removed = 0;
    if (cfg_.policy == CachePolicy::Lru) {
      for (auto it = lru_.begin(); it != lru_.end();) {
        if (it->watermark > ev.trail_pos) {
          lru_index_.erase(it->key);
          it = lru_.erase(it);
          ++removed;
        } else {
          ++it;
        }
      }
    } else {
      for (auto& slot : slots_)
        if (slot && slot->watermark > ev.trail_pos) {
          slot.reset();
          --occupied_;
          ++removed;
        }
    }
    if (removed) ++stats_.flushes;
  }

  /// Query reset: the cache never outlives the store it describes.
  void reset() { flush(); }

  void flush() {
    if (size() == 0) return;
    lru_.clear();
    lru_index_.clear();
    for (auto& s : slots_) s.reset();
    occupied_ = 0;
    ++stats_.flushes;
  }

  std::size_t size() const {
    return cfg_.policy == CachePolicy::Lru ? lru_.size() : occupied_;
  }

  bool contains(NodeId node, TypeId type) const {
    CacheKey k{node, type};
    if (!enabled()) return false;
    if (cfg_.policy == CachePolicy::Lru) return lru_index_.count(k) != 0;
    const auto& slot = slots_[node % cfg_.capacity];
    return slot && slot->key == k;
  }

  /// Resident entries; LRU order is most recent first, DM order is by slot.
  std::vector<Entry> entries() const {
    std::vector<Entry> out;
    if (cfg_.policy == CachePolicy::Lru) {
      out.assign(lru_.begin(), lru_.end());
    } else {
      for (const auto& s : slots_)
        if (s) out.push_back(*s);
    }
    return out;
  }

  /// Direct-mapped: slot index holding `key`, if resident.
  std::optional<std::size_t> slot_of(const CacheKey& k) const {
    if (cfg_.policy != CachePolicy::DirectMapped) return std::nullopt;
    for (std::size_t i = 0; i < slots_.size(); ++i)
      if (slots_[i] && slots_[i]->key == k) return i;
    return std::nullopt;
  }

  /// Test hook: plant an entry without verification (soundness-audit tests).
  void force_insert_unchecked(NodeId node, TypeId type) { insert(node, type, 0, 0); }

 private:
  void maybe_chaos() {
    if (cfg_.chaos_flush_probability <= 0) return;
    if (std::uniform_real_distribution<double>(0, 1)(rng_) < cfg_.chaos_flush_probability) flush();
  }

  CacheConfig cfg_;
  CacheStats stats_;
  std::list<Entry> lru_;
  std::unordered_map<CacheKey, std::list<Entry>::iterator, CacheKeyHash> lru_index_;
  std::vector<std::optional<Entry>> slots_;
  std::size_t occupied_ = 0;
  std::mt19937_64 rng_;
};

}  // namespace memocheck
