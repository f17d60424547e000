// Acceptance suite: every criterion prints one PASS/FAIL line; the process
// exits nonzero if any fail. Expected runtime is dominated by the long
// capacity-12 ball-sim run (a few minutes on two cores).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mirage/analytic.hpp"
#include "mirage/ballsim.hpp"
#include "mirage/baselines.hpp"
#include "mirage/cache.hpp"
#include "mirage/harness.hpp"

using namespace mirage;

namespace {

int failures = 0;

class Criterion {
 public:
  explicit Criterion(std::string name) : name_(std::move(name)) {
    start_ = std::chrono::steady_clock::now();
  }

  void check(bool ok, const std::string& detail) {
    if (!ok) {
      all_ok_ = false;
      details_ += "\n    FAILED: " + detail;
    } else {
      details_ += "\n    ok: " + detail;
    }
  }

  ~Criterion() {
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::printf("[%s] %s (%.1fs)%s\n", all_ok_ ? "PASS" : "FAIL", name_.c_str(), secs,
                details_.c_str());
    std::fflush(stdout);
    if (!all_ok_) ++failures;
  }

 private:
  std::string name_;
  std::string details_;
  bool all_ok_ = true;
  std::chrono::steady_clock::time_point start_;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool within_factor(double measured, double target, double factor) {
  return measured >= target / factor && measured <= target * factor;
}

// ---------------------------------------------------------------------------

void criterion1_ballsim_spill_table() {
  Criterion c("1. ball-sim installs-per-spill for W=8..11 match 1/4/60/8000 (+-50%)");
  struct Point {
    uint32_t capacity;
    uint64_t throws;
    double target;
  };
  const Point points[] = {
      {8, 200000, 1.0}, {9, 2000000, 4.0}, {10, 20000000, 60.0}, {11, 80000000, 8000.0}};
  for (const Point& p : points) {
    ballsim::BallSimConfig cfg;
    cfg.bucket_capacity = p.capacity;
    cfg.throws = p.throws;
    cfg.sample_interval = 0;
    cfg.seed = 1000 + p.capacity;
    const ballsim::SpillStats stats = ballsim::run_trial(cfg);
    const double rate = stats.installs_per_spill();
    const bool ok = stats.spills >= 30 && rate >= p.target * 0.5 && rate <= p.target * 1.5;
    c.check(ok, fmt("W=%.0f: %.3g installs/spill (target %.3g, spills ",
                    static_cast<double>(p.capacity), rate, p.target) +
                    std::to_string(stats.spills) + ")");
  }
}

void criterion2_w12_long_run() {
  Criterion c("2. W=12 installs-per-spill within 10x of 1.6e8 over >= 1e10 throws");
  ballsim::BallSimConfig cfg;
  cfg.bucket_capacity = 12;
  cfg.throws = 2'500'000'000ULL;
  cfg.sample_interval = 0;
  const ballsim::SpillStats stats = ballsim::run_parallel(cfg, 4, 20240901, 0);
  const double rate = stats.installs_per_spill();
  c.check(stats.throws >= 10'000'000'000ULL,
          fmt("%.3g throws", static_cast<double>(stats.throws)));
  c.check(within_factor(rate, 1.6e8, 10.0),
          fmt("%.3g installs/spill (target 1.6e8, spills ", rate) +
              std::to_string(stats.spills) + ")");
}

void criterion3_analytic_chain() {
  Criterion c("3. analytic chain: Pr(13/14/15) ~ 1e-9/1e-17/1e-35; W=12/13/14 rates");
  const auto t0 = std::chrono::steady_clock::now();
  const analytic::SteadyState st = analytic::steady_state(4e-6, 8.0, 20);
  const double lg12 = analytic::log10_installs_per_sae(st, 12);
  const double lg13 = analytic::log10_installs_per_sae(st, 13);
  const double lg14 = analytic::log10_installs_per_sae(st, 14);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  c.check(std::fabs(st.log10_probs[13] - (-9.0)) <= 1.0,
          fmt("log10 Pr(n=13) = %.2f (target -9 +- 1)", st.log10_probs[13]));
  c.check(std::fabs(st.log10_probs[14] - (-17.0)) <= 1.0,
          fmt("log10 Pr(n=14) = %.2f (target -17 +- 1)", st.log10_probs[14]));
  c.check(std::fabs(st.log10_probs[15] - (-35.0)) <= 1.0,
          fmt("log10 Pr(n=15) = %.2f (target -35 +- 1)", st.log10_probs[15]));
  c.check(std::fabs(lg12 - std::log10(2e8)) <= 1.0,
          fmt("W=12: 1e%.2f installs/SAE (target 2e8 +- 1 order)", lg12));
  c.check(std::fabs(lg13 - std::log10(7e16)) <= 1.0,
          fmt("W=13: 1e%.2f installs/SAE (target 7e16 +- 1 order)", lg13));
  c.check(std::fabs(lg14 - 34.0) <= 1.0, fmt("W=14: 1e%.2f installs/SAE (target 1e34)", lg14));
  c.check(elapsed < 1e-3, fmt("runtime %.2g s (< 1 ms)", elapsed));
}

void criterion4_relocation_extrapolation() {
  Criterion c("4. relocation extrapolation 2e8 * 16384^n, factor 2 of quoted values");
  const double base = 2e8;
  const double expected[] = {2e8, 3.3e12, 5.4e16, 8.8e20};
  const double quoted[] = {2e8, 3e12, 4e16, 7e20};
  for (uint32_t n = 0; n <= 3; ++n) {
    const double v = analytic::installs_per_sae_with_relocation(base, n, 16384);
    c.check(within_factor(v, expected[n], 1.05) && within_factor(v, quoted[n], 2.0),
            fmt("n=%.0f: %.4g installs/SAE (paper %.2g)", static_cast<double>(n), v, quoted[n]));
  }
  const analytic::Duration d =
      analytic::time_per_sae(analytic::installs_per_sae_with_relocation(base, 3, 16384), 1e9);
  c.check(within_factor(d.years, 22000.0, 2.0), fmt("n=3: %.3g years per SAE", d.years));
}

void criterion5_storage_table() {
  Criterion c("5. storage calculator bit-exact: 17280 / 20800 (120%) / 20256 (117%) KB");
  const CacheGeometry g;
  const auto base = analytic::storage_report(g, analytic::StorageVariant::Baseline);
  const auto m75 = analytic::storage_report(g, analytic::StorageVariant::Mirage75);
  const auto m50 = analytic::storage_report(g, analytic::StorageVariant::Mirage50);
  c.check(base.total_kb == 17280.0, fmt("baseline %.0f KB", base.total_kb));
  c.check(m75.total_kb == 20800.0 && std::lround(m75.percent_of_baseline) == 120,
          fmt("75%% extra tags: %.0f KB (%.0f%%)", m75.total_kb,
              std::round(m75.percent_of_baseline)));
  c.check(m50.total_kb == 20256.0 && std::lround(m50.percent_of_baseline) == 117,
          fmt("50%% extra tags: %.0f KB (%.0f%%)", m50.total_kb,
              std::round(m50.percent_of_baseline)));
  c.check(m75.tag_store_kb == 3808.0 && m75.data_store_kb == 16992.0 &&
              m50.tag_store_kb == 3264.0,
          "per-structure sizes match (3808/16992/3264 KB)");
}

void criterion6_security_properties() {
  Criterion c("6. zero SAE at 14 ways over 1e8 installs; V-way targeting; random-skew rate");
  {
    nlohmann::json j;
    j["model"] = "mirage";
    j["seed"] = 31;
    j["trace"] = {{"kind", "uniform"}, {"length", 100000000}, {"address_space_bits", 34}};
    const ExperimentReport rep = run_experiment(config_from_json(j));
    c.check(rep.counters.set_associative_evictions == 0,
            fmt("14 ways/skew: %.0f SAE in 1e8 uniform installs",
                static_cast<double>(rep.counters.set_associative_evictions)));
  }
  {
    CacheGeometry g;
    auto vway = make_vway(g, /*identity_mapping=*/true, 32);
    const uint32_t sets = vway->geometry().sets_per_skew;
    const uint32_t ways = vway->geometry().ways_per_skew();
    for (uint64_t i = 0; i < ways; ++i)
      vway->install(LineAddress(3 + i * sets), SecurityDomainId(0));
    const uint64_t warm_misses = vway->counters().misses;
    const uint64_t warm_sae = vway->counters().set_associative_evictions;
    for (uint64_t i = ways; i < ways + 100000; ++i)
      vway->install(LineAddress(3 + i * sets), SecurityDomainId(0));
    const double misses = static_cast<double>(vway->counters().misses - warm_misses);
    const double sae =
        static_cast<double>(vway->counters().set_associative_evictions - warm_sae);
    c.check(sae >= 0.99 * misses,
            fmt("identity V-way set targeting: SAE on %.2f%% of post-warmup misses",
                100.0 * sae / misses));
  }
  {
    ballsim::BallSimConfig cfg;
    cfg.selection = Selection::RandomSkew;
    cfg.bucket_capacity = 14;
    cfg.throws = 20000000;
    cfg.sample_interval = 0;
    cfg.seed = 33;
    const ballsim::SpillStats stats = ballsim::run_trial(cfg);
    const double rate = stats.installs_per_spill();
    c.check(rate >= 1300.0 && rate <= 3900.0,
            fmt("random skew selection at W=14: spill every %.0f installs (target ~2600)", rate));
  }
}

void criterion7_invariant_suite() {
  Criterion c("7. invariant suite over randomized sequences of length >= 1e6");
  {
    // Pointer bijection, per-set capacity, domain isolation under a hostile
    // mix of installs, writes and flushes on a conflict-heavy geometry.
    CacheGeometry g;
    g.sets_per_skew = 64;
    g.base_ways_per_skew = 4;
    g.extra_ways_per_skew = 1;
    MirageCacheConfig mc;
    mc.geometry = g;
    mc.max_relocations = 2;
    MirageCache cache(mc, PrinceIndexFn::from_seed(71, 2), 72);
    Xoshiro256pp rng(73);
    bool capacity_ok = true, isolation_ok = true, bijection_ok = true;
    for (uint64_t i = 0; i < 1000000; ++i) {
      const LineAddress a(rng.next_below(1 << 13));
      const SecurityDomainId d(static_cast<uint8_t>(rng.next_below(3)));
      const uint64_t op = rng.next_below(10);
      if (op == 0)
        cache.flush(a, d);
      else if (op == 1)
        cache.write(a, d);
      else
        cache.install(a, d);
      if ((i & 0xfff) == 0) {
        const SecurityDomainId other(static_cast<uint8_t>((d.value + 1) % 3));
        const LookupResult r = cache.lookup(a, other);
        if (r.hit && cache.tag_at(r.skew, r.set, r.way).sdid.value != other.value)
          isolation_ok = false;
      }
      if ((i & 0x1ffff) == 0 && !cache.validate_bijection().ok) bijection_ok = false;
    }
    for (uint32_t skew = 0; skew < 2 && capacity_ok; ++skew)
      for (uint32_t set = 0; set < g.sets_per_skew && capacity_ok; ++set) {
        uint32_t valid = 0;
        for (uint32_t w = 0; w < g.ways_per_skew(); ++w)
          valid += cache.tag_at(skew, set, w).valid;
        if (valid > g.ways_per_skew() ||
            valid + cache.invalid_tags_in(skew, set) != g.ways_per_skew())
          capacity_ok = false;
      }
    bijection_ok = bijection_ok && cache.validate_bijection().ok;
    c.check(bijection_ok, "pointer bijection across 1e6 mixed cache operations");
    c.check(capacity_ok, "per-set capacity bound");
    c.check(isolation_ok, "domain isolation");
    c.check(cache.counters().relocations > 0, "sequence exercised relocations");
  }
  {
    // Relocation content preservation over explicit conflict events.
    CacheGeometry g;
    g.sets_per_skew = 16;
    g.base_ways_per_skew = 4;
    g.extra_ways_per_skew = 1;
    MirageCacheConfig mc;
    mc.geometry = g;
    mc.max_relocations = 0;
    MirageCache cache(mc, PrinceIndexFn::from_seed(81, 2), 82);
    Xoshiro256pp rng(83);
    auto contents = [&] {
      std::map<std::pair<uint64_t, uint8_t>, int> m;
      for (uint32_t skew = 0; skew < 2; ++skew)
        for (uint32_t set = 0; set < g.sets_per_skew; ++set)
          for (uint32_t w = 0; w < g.ways_per_skew(); ++w) {
            const TagEntryView t = cache.tag_at(skew, set, w);
            if (t.valid) m[{t.tag.value, t.sdid.value}]++;
          }
      return m;
    };
    bool content_ok = true;
    int events = 0;
    uint64_t steps = 0;
    while (events < 400 && steps < 3000000) {
      const LineAddress a(rng.next_below(1 << 20));
      const SecurityDomainId d(0);
      ++steps;
      if (cache.lookup(a, d).hit) continue;
      const uint32_t i0 = cache.set_index(0, d, a);
      const uint32_t i1 = cache.set_index(1, d, a);
      if (cache.invalid_tags_in(0, i0) == 0 && cache.invalid_tags_in(1, i1) == 0) {
        const auto before = contents();
        const RelocationResult res = cache.attempt_relocation(i0, i1, RelocationPolicy{3});
        if (res.attempts_used > 3) content_ok = false;
        if (contents() != before) content_ok = false;
        if (!cache.validate_bijection().ok) content_ok = false;
        ++events;
      }
      cache.install(a, d);
    }
    c.check(content_ok && events >= 400,
            "relocation preserves resident contents (" + std::to_string(events) + " events)");
  }
  {
    // Ball conservation: census every throw must weight to the population.
    ballsim::BallSimConfig cfg;
    cfg.buckets_per_skew = 1024;
    cfg.balls = 16384;
    cfg.bucket_capacity = 9;
    cfg.throws = 1000000;
    cfg.sample_interval = 1;
    cfg.seed = 84;
    const ballsim::SpillStats stats = ballsim::run_trial(cfg);
    uint64_t balls = 0, buckets = 0;
    for (size_t l = 0; l < stats.occupancy_histogram.size(); ++l) {
      balls += l * stats.occupancy_histogram[l];
      buckets += stats.occupancy_histogram[l];
    }
    c.check(balls == stats.occupancy_samples * cfg.balls &&
                buckets == stats.occupancy_samples * cfg.total_buckets(),
            "ball conservation across 1e6 remove+insert steps");
  }
  {
    const analytic::SteadyState st = analytic::steady_state(4e-6, 8.0, 20);
    const double res = analytic::max_balance_residual(st);
    c.check(res < 1e-12, fmt("detailed-balance residual %.2g < 1e-12", res));
  }
}

void criterion8_oracle_equivalence() {
  Criterion c("8. oracle equivalence: LRU brute force; analytic vs ball-sim occupancy");
  {
    // Brute-force LRU oracle over tiny geometries, exact sequence match.
    bool ok = true;
    for (uint32_t sets : {2u, 4u}) {
      for (uint32_t ways : {2u, 4u}) {
        SetAssocLru cache(sets, ways);
        std::vector<std::vector<uint64_t>> recency(sets);
        Xoshiro256pp rng(900 + sets * 10 + ways);
        for (int i = 0; i < 10000; ++i) {
          const uint64_t addr = rng.next_below(48);
          auto& lst = recency[addr & (sets - 1)];
          bool oracle_hit = false;
          for (size_t k = 0; k < lst.size(); ++k) {
            if (lst[k] == addr) {
              lst.erase(lst.begin() + static_cast<long>(k));
              oracle_hit = true;
              break;
            }
          }
          lst.insert(lst.begin(), addr);
          if (lst.size() > ways) lst.pop_back();
          const bool hit = cache.install(LineAddress(addr)).kind == InstallKind::Hit;
          if (hit != oracle_hit) ok = false;
        }
      }
    }
    c.check(ok, "set-associative LRU matches the brute-force oracle exactly");
  }
  {
    // Analytic occupancy vs measured ball-sim histogram, factor 2 wherever
    // the simulation has at least 100 observations.
    ballsim::BallSimConfig cfg;
    cfg.throws = 20000000;
    cfg.warmup_throws = 2000000;
    cfg.sample_interval = 64;
    cfg.seed = 91;
    const ballsim::SpillStats stats = ballsim::run_trial(cfg);
    const analytic::SteadyState st = analytic::steady_state(4e-6, 8.0, 20);
    const double total = static_cast<double>(stats.occupancy_samples) *
                         static_cast<double>(cfg.total_buckets());
    bool ok = true;
    std::string worst;
    for (uint32_t n = 0; n < stats.occupancy_histogram.size(); ++n) {
      if (stats.occupancy_histogram[n] < 100) continue;
      const double measured = static_cast<double>(stats.occupancy_histogram[n]) / total;
      if (!within_factor(measured, st.probs[n], 2.0)) {
        ok = false;
        worst += fmt(" n=%.0f: %.3g vs %.3g;", static_cast<double>(n), measured, st.probs[n]);
      }
    }
    c.check(ok, worst.empty() ? "occupancy matches for every level with >= 100 observations"
                              : "mismatch at" + worst);
  }
}

}  // namespace

int main() {
  std::printf("acceptance suite (expect a few minutes; the W=12 run dominates)\n");
  criterion1_ballsim_spill_table();
  criterion3_analytic_chain();
  criterion4_relocation_extrapolation();
  criterion5_storage_table();
  criterion7_invariant_suite();
  criterion8_oracle_equivalence();
  criterion6_security_properties();
  criterion2_w12_long_run();
  std::printf("%s (%d criterion failure%s)\n", failures == 0 ? "ALL PASS" : "FAILURES",
              failures, failures == 1 ? "" : "s");
  return failures == 0 ? 0 : 1;
}
