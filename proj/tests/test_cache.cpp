#include <memory>
#include <vector>

#include "doctest.h"
#include "mirage/cache.hpp"
#include "support/stats.hpp"

using namespace mirage;

namespace {

CacheGeometry small_geometry(uint32_t sets = 64, uint32_t base = 4, uint32_t extra = 2) {
  CacheGeometry g;
  g.sets_per_skew = sets;
  g.base_ways_per_skew = base;
  g.extra_ways_per_skew = extra;
  return g;
}

std::unique_ptr<MirageCache> make_cache(const CacheGeometry& g, uint64_t seed = 1,
                                        std::optional<uint32_t> max_reloc = std::nullopt) {
  MirageCacheConfig cfg;
  cfg.geometry = g;
  cfg.max_relocations = max_reloc;
  return std::make_unique<MirageCache>(cfg, PrinceIndexFn::from_seed(seed ^ 0xabcd, g.skews),
                                       seed);
}

}  // namespace

TEST_SUITE_BEGIN("cache");

TEST_CASE("geometry validation rejects non-power-of-two sets") {
  CacheGeometry g = small_geometry(48);
  CHECK_THROWS_AS(make_cache(g), std::invalid_argument);
}

TEST_CASE("lookup on an empty cache misses; installs are read-your-write") {
  auto c = make_cache(small_geometry());
  const LineAddress a(0x1234);
  const SecurityDomainId d(0);
  CHECK_FALSE(c->lookup(a, d).hit);
  const InstallOutcome out = c->install(a, d);
  CHECK(out.kind == InstallKind::FilledInvalidData);
  CHECK(c->lookup(a, d).hit);
  CHECK(c->install(a, d).kind == InstallKind::Hit);
}

TEST_CASE("hits require the SDID to match along with the tag") {
  auto c = make_cache(small_geometry());
  const LineAddress a(0xbeef);
  c->install(a, SecurityDomainId(1));
  CHECK_FALSE(c->lookup(a, SecurityDomainId(2)).hit);
  CHECK(c->lookup(a, SecurityDomainId(1)).hit);
}

TEST_CASE("cold start fills invalid data entries without evicting") {
  auto c = make_cache(small_geometry());
  const uint64_t n = c->geometry().data_entries();
  for (uint64_t i = 0; i < n; ++i) {
    const InstallOutcome out = c->install(LineAddress(i), SecurityDomainId(0));
    CHECK(out.kind == InstallKind::FilledInvalidData);
  }
  CHECK(c->counters().filled_invalid == n);
  CHECK(c->valid_data_count() == n);
}

TEST_CASE("select_skew prefers the strictly larger invalid count") {
  Xoshiro256pp rng(1);
  CHECK(MirageCache::select_skew(3, 1, rng, TieBreak::Random) == 0);
  CHECK(MirageCache::select_skew(0, 5, rng, TieBreak::Random) == 1);
  CHECK(MirageCache::select_skew(2, 2, rng, TieBreak::AlwaysSkew0) == 0);
}

TEST_CASE("select_skew random tie-break is a fair coin") {
  Xoshiro256pp rng(77);
  constexpr uint64_t kTrials = 100000;
  uint64_t zero = 0;
  for (uint64_t i = 0; i < kTrials; ++i)
    zero += MirageCache::select_skew(2, 2, rng, TieBreak::Random) == 0;
  const auto band = teststats::binomial_3sigma(kTrials, 0.5);
  CHECK(band.contains(static_cast<double>(zero)));
}

TEST_CASE("flush removes exactly the addressed domain's copy") {
  auto c = make_cache(small_geometry());
  const LineAddress a(0x77);
  const SecurityDomainId d1(1), d2(2);
  CHECK_FALSE(c->flush(a, d1));  // absent line
  c->install(a, d1);
  c->install(a, d2);
  CHECK(c->flush(a, d1));
  CHECK_FALSE(c->lookup(a, d1).hit);
  CHECK(c->lookup(a, d2).hit);   // duplicate copy survives
  CHECK(c->flush(a, d2));
  CHECK_FALSE(c->lookup(a, d2).hit);
}

TEST_CASE("global eviction reports the only resident line") {
  // Single-entry data store: the one installed line is the only victim.
  CacheGeometry g;
  g.sets_per_skew = 1;
  g.skews = 1;
  g.base_ways_per_skew = 1;
  g.extra_ways_per_skew = 1;
  auto c = make_cache(g);
  CHECK_THROWS(c->global_evict());  // not yet full
  c->install(LineAddress(0xabc), SecurityDomainId(5));
  const auto res = c->global_evict();
  CHECK(res.evicted.addr.value == 0xabc);
  CHECK(res.evicted.sdid.value == 5);
  CHECK(c->valid_tag_count() == 0);
  CHECK(c->valid_data_count() == 0);
  CHECK(c->validate_bijection().ok);
}

TEST_CASE("global eviction victims are uniform over the data store") {
  CacheGeometry g = small_geometry(64, 8, 6);  // 1024 data entries
  auto c = make_cache(g, 3);
  uint64_t next_addr = 0;
  while (c->valid_data_count() < g.data_entries())
    c->install(LineAddress(next_addr++), SecurityDomainId(0));
  constexpr uint64_t kEvictions = 1000000;
  std::vector<uint64_t> hist(g.data_entries(), 0);
  for (uint64_t i = 0; i < kEvictions; ++i) {
    const auto res = c->global_evict();
    hist[res.freed_data_index]++;
    c->install(LineAddress(next_addr++), SecurityDomainId(0));
  }
  CHECK(teststats::chi_square_uniform(hist) <
        teststats::chi_square_critical_999(hist.size() - 1));
}

TEST_CASE("global eviction victim index is independent of the installed set") {
  CacheGeometry g = small_geometry(64, 8, 6);
  auto c = make_cache(g, 9);
  uint64_t next_addr = 0;
  while (c->valid_data_count() < g.data_entries())
    c->install(LineAddress(next_addr++), SecurityDomainId(0));
  // Contingency table: installed-address skew-0 set (16 groups) vs victim
  // data index (16 groups).
  std::vector<std::vector<uint64_t>> table(16, std::vector<uint64_t>(16, 0));
  constexpr uint64_t kInstalls = 1 << 20;
  for (uint64_t i = 0; i < kInstalls; ++i) {
    const LineAddress a(next_addr++);
    const SecurityDomainId d(0);
    const uint32_t set0 = c->set_index(0, d, a);
    const InstallOutcome out = c->install(a, d);
    REQUIRE(out.kind == InstallKind::GlobalEviction);
    // Recover the victim's data index through the installed line's fptr.
    const LookupResult hit = c->lookup(a, d);
    const uint32_t data_index = c->tag_at(hit.skew, hit.set, hit.way).fptr;
    table[set0 & 15][data_index & 15]++;
  }
  const double stat = teststats::chi_square_independence(table);
  CHECK(stat < teststats::chi_square_critical_999(15 * 15));
}

TEST_CASE("per-set capacity never exceeded and misses partition by kind") {
  CacheGeometry g = small_geometry(16, 4, 2);
  auto c = make_cache(g, 5);
  Xoshiro256pp rng(6);
  for (int i = 0; i < 200000; ++i) {
    c->install(LineAddress(rng.next_below(4096)), SecurityDomainId(0));
  }
  for (uint32_t skew = 0; skew < 2; ++skew)
    for (uint32_t set = 0; set < g.sets_per_skew; ++set) {
      uint32_t valid = 0;
      for (uint32_t w = 0; w < g.ways_per_skew(); ++w) valid += c->tag_at(skew, set, w).valid;
      CHECK(valid <= g.ways_per_skew());
      CHECK(valid + c->invalid_tags_in(skew, set) == g.ways_per_skew());
    }
  const CacheCounters& ctr = c->counters();
  CHECK(ctr.hits + ctr.misses == ctr.accesses);
  CHECK(ctr.global_evictions + ctr.set_associative_evictions + ctr.filled_invalid == ctr.misses);
}

TEST_CASE("with zero extra ways a full cache yields an SAE per miss") {
  CacheGeometry g = small_geometry(64, 8, 0);
  auto c = make_cache(g, 11);
  uint64_t next_addr = 0;
  while (c->valid_data_count() < g.data_entries())
    c->install(LineAddress(next_addr++), SecurityDomainId(0));
  const uint64_t sae_before = c->counters().set_associative_evictions;
  constexpr uint64_t kInstalls = 20000;
  uint64_t misses = 0;
  for (uint64_t i = 0; i < kInstalls; ++i) {
    const InstallOutcome out = c->install(LineAddress(next_addr++), SecurityDomainId(0));
    if (out.kind != InstallKind::Hit) ++misses;
  }
  const uint64_t sae = c->counters().set_associative_evictions - sae_before;
  // All tags valid everywhere: every miss must be a set-associative eviction.
  CHECK(sae == misses);
  CHECK(c->validate_bijection().ok);
}

TEST_CASE("default geometry sees no SAE on a uniform miss stream") {
  CacheGeometry g;  // full 16K-set geometry, 14 ways/skew
  auto c = make_cache(g, 21);
  Xoshiro256pp rng(22);
  for (int i = 0; i < 1000000; ++i)
    c->install(LineAddress(rng.next() & ((uint64_t{1} << 40) - 1)), SecurityDomainId(0));
  CHECK(c->counters().set_associative_evictions == 0);
}

TEST_CASE("skew selection dominance holds at install time") {
  CacheGeometry g = small_geometry(32, 4, 2);
  auto c = make_cache(g, 31);
  Xoshiro256pp rng(32);
  for (int i = 0; i < 100000; ++i) {
    const LineAddress a(rng.next_below(1 << 16));
    const SecurityDomainId d(0);
    const uint32_t i0 = c->set_index(0, d, a);
    const uint32_t i1 = c->set_index(1, d, a);
    const uint32_t inv0 = c->invalid_tags_in(0, i0);
    const uint32_t inv1 = c->invalid_tags_in(1, i1);
    const InstallOutcome out = c->install(a, d);
    if (out.kind == InstallKind::Hit || out.kind == InstallKind::SetAssociativeEviction)
      continue;
    const uint32_t chosen = out.skew == 0 ? inv0 : inv1;
    const uint32_t other = out.skew == 0 ? inv1 : inv0;
    CHECK(chosen >= other);
  }
}

TEST_CASE("bijection holds across a long random operation mix") {
  CacheGeometry g = small_geometry(64, 4, 2);
  auto c = make_cache(g, 41);
  Xoshiro256pp rng(42);
  constexpr uint64_t kOps = 1000000;
  for (uint64_t i = 0; i < kOps; ++i) {
    const LineAddress a(rng.next_below(1 << 14));
    const SecurityDomainId d(static_cast<uint8_t>(rng.next_below(4)));
    switch (rng.next_below(8)) {
      case 0:
        c->flush(a, d);
        break;
      case 1:
        c->write(a, d);
        break;
      default:
        c->install(a, d);
    }
    if (i % 100000 == 0) CHECK(c->validate_bijection().ok);
  }
  CHECK(c->validate_bijection().ok);
  CHECK(c->valid_tag_count() == c->valid_data_count());
}

TEST_CASE("domain isolation across a random trace") {
  CacheGeometry g = small_geometry(32, 4, 2);
  auto c = make_cache(g, 51);
  Xoshiro256pp rng(52);
  for (int i = 0; i < 100000; ++i) {
    const LineAddress a(rng.next_below(1 << 12));
    const SecurityDomainId d(static_cast<uint8_t>(rng.next_below(3)));
    c->install(a, d);
    // A hit under a different domain would be an isolation violation.
    const SecurityDomainId other(static_cast<uint8_t>((d.value + 1) % 3));
    const LookupResult r = c->lookup(a, other);
    if (r.hit) {
      const TagEntryView t = c->tag_at(r.skew, r.set, r.way);
      CHECK(t.sdid.value == other.value);  // must be that domain's own copy
    }
  }
}

TEST_CASE("corrupted forward pointer is diagnosed") {
  auto c = make_cache(small_geometry());
  c->install(LineAddress(0x123), SecurityDomainId(0));
  CHECK(c->validate_bijection().ok);
  const LookupResult r = c->lookup(LineAddress(0x123), SecurityDomainId(0));
  REQUIRE(r.hit);
  const uint32_t good = c->tag_at(r.skew, r.set, r.way).fptr;
  c->debug_set_fptr(r.skew, r.set, r.way, good ^ 1);
  const auto rep = c->validate_bijection();
  CHECK_FALSE(rep.ok);
  CHECK_FALSE(rep.diagnostic.empty());
}

TEST_CASE("write marks lines dirty and evictions count writebacks") {
  CacheGeometry g = small_geometry(4, 1, 1);  // tiny: 8 data entries
  auto c = make_cache(g, 61);
  uint64_t a = 0;
  while (c->valid_data_count() < g.data_entries()) c->write(LineAddress(a++), SecurityDomainId(0));
  const uint64_t wb_before = c->counters().writebacks;
  for (int i = 0; i < 64; ++i) c->write(LineAddress(a++), SecurityDomainId(0));
  CHECK(c->counters().writebacks > wb_before);  // dirty victims get written back
}

TEST_SUITE_END();
