#include "mirage/cache.hpp"

#include <cassert>
#include <stdexcept>

namespace mirage {

namespace {
constexpr uint8_t kValid = 0x1;
constexpr uint8_t kDirty = 0x2;
}  // namespace

MirageCache::MirageCache(MirageCacheConfig cfg, std::shared_ptr<const IndexFn> index_fn,
                         uint64_t seed)
    : cfg_(cfg), index_fn_(std::move(index_fn)), rng_(seed) {
  cfg_.geometry.validate();
  if (!index_fn_ || index_fn_->skews() < cfg_.geometry.skews)
    throw std::invalid_argument("index function does not cover all skews");
  if (cfg_.selection == Selection::SingleChoice)
    throw std::invalid_argument("SingleChoice is a ball-model policy, not a cache policy");
  ways_ = cfg_.geometry.ways_per_skew();

  if (cfg_.max_relocations) {
    max_relocations_ = *cfg_.max_relocations;
  } else if (cfg_.geometry.extra_ways_per_skew == 4) {
    max_relocations_ = 3;
  } else {
    max_relocations_ = 0;
  }
  if (cfg_.geometry.skews < 2) max_relocations_ = 0;

  const size_t tags = cfg_.geometry.tag_entries();
  tag_.assign(tags, 0);
  sdid_.assign(tags, 0);
  fptr_.assign(tags, 0);
  flags_.assign(tags, 0);
  invalid_count_.assign(size_t{cfg_.geometry.skews} * cfg_.geometry.sets_per_skew,
                        static_cast<uint8_t>(ways_));

  const size_t data = cfg_.geometry.data_entries();
  rptr_.assign(data, 0);
  data_valid_.assign(data, 0);
  free_data_.resize(data);
  for (size_t i = 0; i < data; ++i) free_data_[i] = static_cast<uint32_t>(i);
}

uint32_t MirageCache::set_index(uint32_t skew, SecurityDomainId sdid, LineAddress addr) const {
  return derive_index(*index_fn_, skew, sdid, addr, cfg_.geometry.sets_per_skew);
}

uint32_t MirageCache::invalid_tags_in(uint32_t skew, uint32_t set) const {
  return invalid_count_[size_t{skew} * cfg_.geometry.sets_per_skew + set];
}

uint32_t MirageCache::select_skew(uint32_t invalid_count_0, uint32_t invalid_count_1,
                                  Xoshiro256pp& rng, TieBreak tie_break) {
  if (invalid_count_0 > invalid_count_1) return 0;
  if (invalid_count_1 > invalid_count_0) return 1;
  if (tie_break == TieBreak::AlwaysSkew0) return 0;
  return rng.next_bool() ? 1 : 0;
}

LookupResult MirageCache::lookup(LineAddress addr, SecurityDomainId sdid) const {
  for (uint32_t skew = 0; skew < cfg_.geometry.skews; ++skew) {
    const uint32_t set = set_index(skew, sdid, addr);
    const size_t base = set_base(skew, set);
    for (uint32_t w = 0; w < ways_; ++w) {
      const size_t s = base + w;
      if ((flags_[s] & kValid) && tag_[s] == addr.value && sdid_[s] == sdid.value)
        return {true, skew, set, w};
    }
  }
  return {};
}

uint32_t MirageCache::find_invalid_way(uint32_t skew, uint32_t set) const {
  const size_t base = set_base(skew, set);
  for (uint32_t w = 0; w < ways_; ++w) {
    if (!(flags_[base + w] & kValid)) return w;
  }
  assert(false && "no invalid way in set");
  return 0;
}

void MirageCache::invalidate_tag(size_t slot, uint32_t skew, uint32_t set) {
  flags_[slot] = 0;
  invalid_count_[size_t{skew} * cfg_.geometry.sets_per_skew + set]++;
}

void MirageCache::claim_tag(size_t slot, uint32_t skew, uint32_t set, LineAddress addr,
                            SecurityDomainId sdid, uint32_t fptr, bool dirty) {
  assert(!(flags_[slot] & kValid));
  tag_[slot] = addr.value;
  sdid_[slot] = sdid.value;
  fptr_[slot] = fptr;
  flags_[slot] = static_cast<uint8_t>(kValid | (dirty ? kDirty : 0));
  invalid_count_[size_t{skew} * cfg_.geometry.sets_per_skew + set]--;
  rptr_[fptr] = static_cast<uint32_t>(slot);
  data_valid_[fptr] = 1;
}

InstallOutcome MirageCache::install(LineAddress addr, SecurityDomainId sdid) {
  uint32_t idx[2] = {0, 0};
  for (uint32_t skew = 0; skew < cfg_.geometry.skews; ++skew)
    idx[skew] = set_index(skew, sdid, addr);
  return install_at(addr, sdid, std::span<const uint32_t>(idx, cfg_.geometry.skews), false);
}

InstallOutcome MirageCache::write(LineAddress addr, SecurityDomainId sdid) {
  uint32_t idx[2] = {0, 0};
  for (uint32_t skew = 0; skew < cfg_.geometry.skews; ++skew)
    idx[skew] = set_index(skew, sdid, addr);
  return install_at(addr, sdid, std::span<const uint32_t>(idx, cfg_.geometry.skews), true);
}

InstallOutcome MirageCache::install_at(LineAddress addr, SecurityDomainId sdid,
                                       std::span<const uint32_t> indices, bool mark_dirty) {
  counters_.accesses++;

  // Hit check across the indexed sets; at most one copy can match.
  for (uint32_t skew = 0; skew < cfg_.geometry.skews; ++skew) {
    const uint32_t set = indices[skew];
    const size_t base = set_base(skew, set);
    for (uint32_t w = 0; w < ways_; ++w) {
      const size_t s = base + w;
      if ((flags_[s] & kValid) && tag_[s] == addr.value && sdid_[s] == sdid.value) {
        counters_.hits++;
        if (mark_dirty) flags_[s] |= kDirty;
        return {InstallKind::Hit, 0, std::nullopt, skew, set};
      }
    }
  }
  counters_.misses++;

  InstallOutcome out;

  // Tag placement: claim an invalid tag in the selected set, else relocate,
  // else evict from one of the indexed sets (SAE).
  uint32_t chosen_skew = 0;
  if (cfg_.geometry.skews == 2) {
    const uint32_t inv0 = invalid_tags_in(0, indices[0]);
    const uint32_t inv1 = invalid_tags_in(1, indices[1]);
    if (cfg_.selection == Selection::LoadAware) {
      chosen_skew = select_skew(inv0, inv1, rng_, cfg_.tie_break);
    } else {
      chosen_skew = rng_.next_bool() ? 1 : 0;
    }
  }
  uint32_t chosen_set = indices[chosen_skew];

  bool have_slot = false;
  uint32_t way = 0;
  if (invalid_tags_in(chosen_skew, chosen_set) > 0) {
    way = find_invalid_way(chosen_skew, chosen_set);
    have_slot = true;
  }

  if (!have_slot && max_relocations_ > 0 && cfg_.geometry.skews == 2 &&
      invalid_tags_in(0, indices[0]) == 0 && invalid_tags_in(1, indices[1]) == 0) {
    RelocationPolicy policy{max_relocations_};
    RelocationResult res = attempt_relocation(indices[0], indices[1], policy);
    counters_.relocation_attempts += res.attempts_used;
    out.relocations_used = res.attempts_used;
    if (res.freed) {
      counters_.relocations++;
      chosen_skew = res.freed->skew;
      chosen_set = res.freed->set;
      way = res.freed->way;
      have_slot = true;
    }
  }

  if (!have_slot) {
    // SAE. Victim: uniform valid way of a uniform one of the indexed sets
    // (for random skew selection, the conflict is local to the chosen set).
    uint32_t sae_skew = chosen_skew;
    if (cfg_.selection == Selection::LoadAware && cfg_.geometry.skews == 2)
      sae_skew = rng_.next_bool() ? 1 : 0;
    const uint32_t sae_set = indices[sae_skew];
    const uint32_t victim_way = static_cast<uint32_t>(rng_.next_below(ways_));
    const size_t vslot = tag_slot(sae_skew, sae_set, victim_way);
    assert(flags_[vslot] & kValid);
    const bool vdirty = (flags_[vslot] & kDirty) != 0;
    out.evicted = EvictedLine{LineAddress(tag_[vslot]), SecurityDomainId(sdid_[vslot]), vdirty};
    if (vdirty) counters_.writebacks++;
    // The victim's own data entry is reused by the incoming line.
    const uint32_t data_index = fptr_[vslot];
    invalidate_tag(vslot, sae_skew, sae_set);
    data_valid_[data_index] = 0;
    claim_tag(vslot, sae_skew, sae_set, addr, sdid, data_index, mark_dirty);
    counters_.set_associative_evictions++;
    out.kind = InstallKind::SetAssociativeEviction;
    out.skew = sae_skew;
    out.set = sae_set;
    return out;
  }

  // Data placement: random invalid entry if one exists, else global eviction.
  uint32_t data_index;
  if (!free_data_.empty()) {
    const size_t pos = rng_.next_below(free_data_.size());
    data_index = free_data_[pos];
    free_data_[pos] = free_data_.back();
    free_data_.pop_back();
    counters_.filled_invalid++;
    out.kind = InstallKind::FilledInvalidData;
  } else {
    data_index = static_cast<uint32_t>(rng_.next_below(rptr_.size()));
    const size_t victim_tag = rptr_[data_index];
    const bool vdirty = (flags_[victim_tag] & kDirty) != 0;
    out.evicted =
        EvictedLine{LineAddress(tag_[victim_tag]), SecurityDomainId(sdid_[victim_tag]), vdirty};
    if (vdirty) counters_.writebacks++;
    const uint32_t vskew = static_cast<uint32_t>(victim_tag / ways_ / cfg_.geometry.sets_per_skew);
    const uint32_t vset = static_cast<uint32_t>(victim_tag / ways_ % cfg_.geometry.sets_per_skew);
    invalidate_tag(victim_tag, vskew, vset);
    data_valid_[data_index] = 0;
    counters_.global_evictions++;
    out.kind = InstallKind::GlobalEviction;
  }

  claim_tag(tag_slot(chosen_skew, chosen_set, way), chosen_skew, chosen_set, addr, sdid,
            data_index, mark_dirty);
  out.skew = chosen_skew;
  out.set = chosen_set;
  return out;
}

MirageCache::GlobalEvictResult MirageCache::global_evict() {
  if (!free_data_.empty())
    throw std::logic_error("global_evict requires a fully valid data store");
  const uint32_t data_index = static_cast<uint32_t>(rng_.next_below(rptr_.size()));
  const size_t victim_tag = rptr_[data_index];
  assert(flags_[victim_tag] & kValid);
  const bool vdirty = (flags_[victim_tag] & kDirty) != 0;
  GlobalEvictResult res;
  res.freed_data_index = data_index;
  res.evicted = EvictedLine{LineAddress(tag_[victim_tag]), SecurityDomainId(sdid_[victim_tag]),
                            vdirty};
  if (vdirty) counters_.writebacks++;
  const uint32_t vskew = static_cast<uint32_t>(victim_tag / ways_ / cfg_.geometry.sets_per_skew);
  const uint32_t vset = static_cast<uint32_t>(victim_tag / ways_ % cfg_.geometry.sets_per_skew);
  invalidate_tag(victim_tag, vskew, vset);
  data_valid_[data_index] = 0;
  free_data_.push_back(data_index);
  counters_.global_evictions++;
  return res;
}

bool MirageCache::flush(LineAddress addr, SecurityDomainId sdid) {
  const LookupResult hit = lookup(addr, sdid);
  if (!hit.hit) return false;
  const size_t slot = tag_slot(hit.skew, hit.set, hit.way);
  if (flags_[slot] & kDirty) counters_.writebacks++;
  const uint32_t data_index = fptr_[slot];
  invalidate_tag(slot, hit.skew, hit.set);
  data_valid_[data_index] = 0;
  free_data_.push_back(data_index);
  return true;
}

MirageCache::BijectionReport MirageCache::validate_bijection() const {
  BijectionReport rep;
  uint64_t valid_tags = 0;
  for (uint32_t skew = 0; skew < cfg_.geometry.skews; ++skew) {
    for (uint32_t set = 0; set < cfg_.geometry.sets_per_skew; ++set) {
      uint32_t invalid_here = 0;
      for (uint32_t w = 0; w < ways_; ++w) {
        const size_t s = tag_slot(skew, set, w);
        if (!(flags_[s] & kValid)) {
          invalid_here++;
          continue;
        }
        valid_tags++;
        const uint32_t f = fptr_[s];
        if (f >= data_valid_.size()) {
          return {false, "tag (" + std::to_string(skew) + "," + std::to_string(set) + "," +
                             std::to_string(w) + ") fptr out of range"};
        }
        if (!data_valid_[f] || rptr_[f] != s) {
          return {false, "tag (" + std::to_string(skew) + "," + std::to_string(set) + "," +
                             std::to_string(w) + ") -> data " + std::to_string(f) +
                             " does not point back"};
        }
      }
      if (invalid_here != invalid_tags_in(skew, set)) {
        return {false, "invalid-tag count mismatch at set (" + std::to_string(skew) + "," +
                           std::to_string(set) + ")"};
      }
    }
  }
  uint64_t valid_data = 0;
  for (size_t d = 0; d < data_valid_.size(); ++d) {
    if (!data_valid_[d]) continue;
    valid_data++;
    const size_t t = rptr_[d];
    if (t >= flags_.size() || !(flags_[t] & kValid) || fptr_[t] != d) {
      return {false, "data " + std::to_string(d) + " -> tag " + std::to_string(t) +
                         " does not point back"};
    }
  }
  if (valid_tags != valid_data) {
    return {false, "valid tag count " + std::to_string(valid_tags) + " != valid data count " +
                       std::to_string(valid_data)};
  }
  return rep;
}

TagEntryView MirageCache::tag_at(uint32_t skew, uint32_t set, uint32_t way) const {
  const size_t s = tag_slot(skew, set, way);
  return {(flags_[s] & kValid) != 0, (flags_[s] & kDirty) != 0, LineAddress(tag_[s]),
          SecurityDomainId(sdid_[s]), fptr_[s]};
}

DataEntryView MirageCache::data_at(uint32_t data_index) const {
  return {data_valid_[data_index] != 0, rptr_[data_index]};
}

uint64_t MirageCache::valid_tag_count() const {
  uint64_t n = 0;
  for (uint8_t f : flags_) n += f & kValid;
  return n;
}

uint64_t MirageCache::valid_data_count() const {
  uint64_t n = 0;
  for (uint8_t v : data_valid_) n += v;
  return n;
}

void MirageCache::debug_set_fptr(uint32_t skew, uint32_t set, uint32_t way, uint32_t fptr) {
  fptr_[tag_slot(skew, set, way)] = fptr;
}

}  // namespace mirage
