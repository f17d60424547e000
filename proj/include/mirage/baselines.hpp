#ifndef MIRAGE_BASELINES_HPP
#define MIRAGE_BASELINES_HPP

#include <memory>
#include <vector>

#include "mirage/cache.hpp"

namespace mirage {

enum class BaselineKind { SetAssocLRU, RandomSkew, VWay };

// Classic non-secure set-associative cache with LRU replacement and identity
// (low-bits) set indexing. Every capacity eviction is by definition an SAE.
class SetAssocLru {
 public:
  SetAssocLru(uint32_t sets, uint32_t ways);
  explicit SetAssocLru(const CacheGeometry& g);

  bool lookup(LineAddress addr) const;
  InstallOutcome install(LineAddress addr, SecurityDomainId sdid = SecurityDomainId(0));
  bool flush(LineAddress addr);

  uint32_t sets() const { return sets_; }
  uint32_t ways() const { return ways_; }
  const CacheCounters& counters() const { return counters_; }

 private:
  uint32_t set_of(LineAddress addr) const { return static_cast<uint32_t>(addr.value) & (sets_ - 1); }

  uint32_t sets_, ways_;
  std::vector<uint64_t> tag_;
  std::vector<uint8_t> valid_;
  std::vector<uint64_t> stamp_;
  uint64_t clock_ = 0;
  CacheCounters counters_;
};

// Scatter-Cache-like comparison model: same keyed skewed tag store as the
// load-aware design, but the skew is picked uniformly at random and a full
// chosen set forces an SAE there.
std::unique_ptr<MirageCache> make_random_skew(const CacheGeometry& g,
                                              std::shared_ptr<const IndexFn> index_fn,
                                              uint64_t seed);

// Geometry for the single-hash extra-tag substrate: one skew holding the full
// way count, same data capacity.
CacheGeometry vway_geometry(const CacheGeometry& g);

// identity_mapping exposes the known address-to-set mapping used by the
// set-targeting demonstration; the default uses keyed indexing.
std::unique_ptr<MirageCache> make_vway(const CacheGeometry& g, bool identity_mapping,
                                       uint64_t seed);

}  // namespace mirage

#endif  // MIRAGE_BASELINES_HPP
