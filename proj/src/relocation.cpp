#include <cassert>

#include "mirage/cache.hpp"

namespace mirage {

// Candidates are drawn without replacement from the union of the two
// conflicting sets; a candidate moves to its alternative set in the other
// skew when that set has an invalid tag. Single-depth moves only.
RelocationResult MirageCache::attempt_relocation(uint32_t set0, uint32_t set1,
                                                 const RelocationPolicy& policy) {
  RelocationResult res;
  if (cfg_.geometry.skews != 2 || policy.max_attempts == 0) return res;

  const uint32_t pool_size = 2 * ways_;
  // Partial Fisher-Yates over candidate ids: [0, ways) in set0, rest in set1.
  std::vector<uint32_t> pool(pool_size);
  for (uint32_t i = 0; i < pool_size; ++i) pool[i] = i;

  const uint32_t attempts = std::min(policy.max_attempts, pool_size);
  for (uint32_t a = 0; a < attempts; ++a) {
    const uint32_t pick = a + static_cast<uint32_t>(rng_.next_below(pool_size - a));
    std::swap(pool[a], pool[pick]);
    const uint32_t cand = pool[a];
    const uint32_t cand_skew = cand < ways_ ? 0 : 1;
    const uint32_t cand_set = cand_skew == 0 ? set0 : set1;
    const uint32_t cand_way = cand < ways_ ? cand : cand - ways_;
    const size_t src = tag_slot(cand_skew, cand_set, cand_way);
    res.attempts_used = a + 1;
    if (!(flags_[src] & 0x1)) continue;  // conflict sets are normally all valid

    const LineAddress cand_addr{tag_[src]};
    const SecurityDomainId cand_sdid{sdid_[src]};
    const uint32_t other = 1 - cand_skew;
    const uint32_t alt_set = set_index(other, cand_sdid, cand_addr);
    if (invalid_tags_in(other, alt_set) == 0) continue;

    // Move the tag entry; the data entry stays put, only its rptr changes.
    const uint32_t alt_way = find_invalid_way(other, alt_set);
    const size_t dst = tag_slot(other, alt_set, alt_way);
    tag_[dst] = tag_[src];
    sdid_[dst] = sdid_[src];
    fptr_[dst] = fptr_[src];
    flags_[dst] = flags_[src];
    invalid_count_[size_t{other} * cfg_.geometry.sets_per_skew + alt_set]--;
    rptr_[fptr_[dst]] = static_cast<uint32_t>(dst);
    invalidate_tag(src, cand_skew, cand_set);
    res.freed = FreedSlot{cand_skew, cand_set, cand_way};
    return res;
  }
  return res;
}

}  // namespace mirage
