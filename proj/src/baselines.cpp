#include "mirage/baselines.hpp"

#include <bit>
#include <stdexcept>

namespace mirage {

SetAssocLru::SetAssocLru(uint32_t sets, uint32_t ways) : sets_(sets), ways_(ways) {
  if (sets == 0 || !std::has_single_bit(sets))
    throw std::invalid_argument("set count must be a power of two");
  if (ways == 0) throw std::invalid_argument("way count must be positive");
  tag_.assign(size_t{sets} * ways, 0);
  valid_.assign(size_t{sets} * ways, 0);
  stamp_.assign(size_t{sets} * ways, 0);
}

SetAssocLru::SetAssocLru(const CacheGeometry& g)
    : SetAssocLru(static_cast<uint32_t>(g.data_entries() / (g.skews * g.base_ways_per_skew)),
                  g.skews * g.base_ways_per_skew) {}

bool SetAssocLru::lookup(LineAddress addr) const {
  const size_t base = size_t{set_of(addr)} * ways_;
  for (uint32_t w = 0; w < ways_; ++w)
    if (valid_[base + w] && tag_[base + w] == addr.value) return true;
  return false;
}

InstallOutcome SetAssocLru::install(LineAddress addr, SecurityDomainId) {
  counters_.accesses++;
  const uint32_t set = set_of(addr);
  const size_t base = size_t{set} * ways_;
  ++clock_;
  for (uint32_t w = 0; w < ways_; ++w) {
    if (valid_[base + w] && tag_[base + w] == addr.value) {
      counters_.hits++;
      stamp_[base + w] = clock_;
      return {InstallKind::Hit, 0, std::nullopt, 0, set};
    }
  }
  counters_.misses++;
  for (uint32_t w = 0; w < ways_; ++w) {
    if (!valid_[base + w]) {
      valid_[base + w] = 1;
      tag_[base + w] = addr.value;
      stamp_[base + w] = clock_;
      counters_.filled_invalid++;
      return {InstallKind::FilledInvalidData, 0, std::nullopt, 0, set};
    }
  }
  uint32_t victim = 0;
  for (uint32_t w = 1; w < ways_; ++w)
    if (stamp_[base + w] < stamp_[base + victim]) victim = w;
  InstallOutcome out{InstallKind::SetAssociativeEviction, 0,
                     EvictedLine{LineAddress(tag_[base + victim]), SecurityDomainId(0), false}, 0,
                     set};
  tag_[base + victim] = addr.value;
  stamp_[base + victim] = clock_;
  counters_.set_associative_evictions++;
  return out;
}

bool SetAssocLru::flush(LineAddress addr) {
  const size_t base = size_t{set_of(addr)} * ways_;
  for (uint32_t w = 0; w < ways_; ++w) {
    if (valid_[base + w] && tag_[base + w] == addr.value) {
      valid_[base + w] = 0;
      return true;
    }
  }
  return false;
}

std::unique_ptr<MirageCache> make_random_skew(const CacheGeometry& g,
                                              std::shared_ptr<const IndexFn> index_fn,
                                              uint64_t seed) {
  MirageCacheConfig cfg;
  cfg.geometry = g;
  cfg.selection = Selection::RandomSkew;
  cfg.max_relocations = 0;
  return std::make_unique<MirageCache>(cfg, std::move(index_fn), seed);
}

CacheGeometry vway_geometry(const CacheGeometry& g) {
  CacheGeometry v = g;
  v.skews = 1;
  v.base_ways_per_skew = g.skews * g.base_ways_per_skew;
  v.extra_ways_per_skew = g.skews * g.extra_ways_per_skew;
  return v;
}

std::unique_ptr<MirageCache> make_vway(const CacheGeometry& g, bool identity_mapping,
                                       uint64_t seed) {
  const CacheGeometry v = vway_geometry(g);
  std::shared_ptr<const IndexFn> fn;
  if (identity_mapping)
    fn = std::make_shared<IdentityIndexFn>(1);
  else
    fn = PrinceIndexFn::from_seed(derive_stream_seed(seed, 0x7761795F6B657973ULL), 1);
  MirageCacheConfig cfg;
  cfg.geometry = v;
  cfg.max_relocations = 0;
  return std::make_unique<MirageCache>(cfg, std::move(fn), seed);
}

}  // namespace mirage
