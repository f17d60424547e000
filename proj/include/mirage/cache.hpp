#ifndef MIRAGE_CACHE_HPP
#define MIRAGE_CACHE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mirage/geometry.hpp"
#include "mirage/indexing.hpp"
#include "mirage/policies.hpp"
#include "mirage/relocation.hpp"
#include "mirage/rng.hpp"

namespace mirage {

enum class InstallKind : uint8_t {
  Hit,
  GlobalEviction,
  SetAssociativeEviction,
  FilledInvalidData,
};

struct EvictedLine {
  LineAddress addr;
  SecurityDomainId sdid;
  bool dirty = false;
};

struct InstallOutcome {
  InstallKind kind = InstallKind::Hit;
  uint32_t relocations_used = 0;
  std::optional<EvictedLine> evicted;
  uint32_t skew = 0;  // installed (or hit) location
  uint32_t set = 0;
};

struct LookupResult {
  bool hit = false;
  uint32_t skew = 0;
  uint32_t set = 0;
  uint32_t way = 0;
};

struct TagEntryView {
  bool valid = false;
  bool dirty = false;
  LineAddress tag;
  SecurityDomainId sdid;
  uint32_t fptr = 0;
};

struct DataEntryView {
  bool valid = false;
  uint32_t rptr = 0;
};

struct CacheCounters {
  uint64_t accesses = 0;
  uint64_t hits = 0;
  uint64_t misses = 0;
  uint64_t global_evictions = 0;
  uint64_t set_associative_evictions = 0;
  uint64_t filled_invalid = 0;
  uint64_t relocation_attempts = 0;
  uint64_t relocations = 0;
  uint64_t writebacks = 0;
};

struct MirageCacheConfig {
  CacheGeometry geometry;
  Selection selection = Selection::LoadAware;
  TieBreak tie_break = TieBreak::Random;
  // Relocation budget on a double-full conflict. Unset applies the default
  // rule: 0 with >= 6 extra ways/skew, 3 with exactly 4, else 0.
  std::optional<uint32_t> max_relocations;
};

// Functional model of the decoupled tag/data cache: skewed keyed indexing,
// load-aware skew selection, pointer indirection, global random eviction,
// SDID-scoped hits and flushes. Single-threaded mutable state machine.
class MirageCache {
 public:
  MirageCache(MirageCacheConfig cfg, std::shared_ptr<const IndexFn> index_fn, uint64_t seed);

  LookupResult lookup(LineAddress addr, SecurityDomainId sdid) const;
  InstallOutcome install(LineAddress addr, SecurityDomainId sdid);
  InstallOutcome write(LineAddress addr, SecurityDomainId sdid);
  bool flush(LineAddress addr, SecurityDomainId sdid);

  // Fast path with indices precomputed by derive_index_batch; `indices` holds
  // one set index per skew and must match set_index() for (addr, sdid).
  InstallOutcome install_at(LineAddress addr, SecurityDomainId sdid,
                            std::span<const uint32_t> indices, bool mark_dirty = false);

  struct GlobalEvictResult {
    uint32_t freed_data_index = 0;
    EvictedLine evicted;
  };
  // Uniform victim over the whole data store; requires every entry valid.
  GlobalEvictResult global_evict();

  RelocationResult attempt_relocation(uint32_t set0, uint32_t set1,
                                      const RelocationPolicy& policy);

  struct BijectionReport {
    bool ok = true;
    std::string diagnostic;
  };
  BijectionReport validate_bijection() const;

  static uint32_t select_skew(uint32_t invalid_count_0, uint32_t invalid_count_1,
                              Xoshiro256pp& rng, TieBreak tie_break);

  uint32_t set_index(uint32_t skew, SecurityDomainId sdid, LineAddress addr) const;
  uint32_t invalid_tags_in(uint32_t skew, uint32_t set) const;
  TagEntryView tag_at(uint32_t skew, uint32_t set, uint32_t way) const;
  DataEntryView data_at(uint32_t data_index) const;
  uint64_t valid_tag_count() const;
  uint64_t valid_data_count() const;

  const CacheGeometry& geometry() const { return cfg_.geometry; }
  const MirageCacheConfig& config() const { return cfg_; }
  const IndexFn& index_fn() const { return *index_fn_; }
  uint32_t max_relocations() const { return max_relocations_; }
  const CacheCounters& counters() const { return counters_; }

  // Test fixture hook: fabricate a broken forward pointer.
  void debug_set_fptr(uint32_t skew, uint32_t set, uint32_t way, uint32_t fptr);

 private:
  friend struct RelocationAccess;

  size_t tag_slot(uint32_t skew, uint32_t set, uint32_t way) const {
    return (size_t{skew} * cfg_.geometry.sets_per_skew + set) * ways_ + way;
  }
  size_t set_base(uint32_t skew, uint32_t set) const {
    return (size_t{skew} * cfg_.geometry.sets_per_skew + set) * ways_;
  }
  uint32_t find_invalid_way(uint32_t skew, uint32_t set) const;
  void invalidate_tag(size_t slot, uint32_t skew, uint32_t set);
  void claim_tag(size_t slot, uint32_t skew, uint32_t set, LineAddress addr,
                 SecurityDomainId sdid, uint32_t fptr, bool dirty);

  MirageCacheConfig cfg_;
  std::shared_ptr<const IndexFn> index_fn_;
  mutable Xoshiro256pp rng_;
  uint32_t ways_ = 0;
  uint32_t max_relocations_ = 0;

  // Tag store (struct-of-arrays) and the per-set invalid-tag counts.
  std::vector<uint64_t> tag_;
  std::vector<uint8_t> sdid_;
  std::vector<uint32_t> fptr_;
  std::vector<uint8_t> flags_;  // bit0 valid, bit1 dirty
  std::vector<uint8_t> invalid_count_;

  // Data store: reverse pointers plus a free list for uniform claims.
  std::vector<uint32_t> rptr_;
  std::vector<uint8_t> data_valid_;
  std::vector<uint32_t> free_data_;

  CacheCounters counters_;
};

}  // namespace mirage

#endif  // MIRAGE_CACHE_HPP
