#include "mirage/harness.hpp"

#include <chrono>
#include <stdexcept>

#include "mirage/analytic.hpp"
#include "mirage/baselines.hpp"
#include "mirage/indexing.hpp"

namespace mirage {

namespace {

// Seed streams so the key material, trace, and replacement randomness are
// decorrelated but all flow from the one experiment seed.
constexpr uint64_t kKeyStream = 0x6b657973ULL;
constexpr uint64_t kTraceStream = 0x74726163ULL;
constexpr uint64_t kCacheStream = 0x63616368ULL;

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

TraceKind trace_kind_from_string(const std::string& s) {
  if (s == "uniform") return TraceKind::UniformRandom;
  if (s == "zipf") return TraceKind::Zipf;
  if (s == "adversarial") return TraceKind::AdversarialSet;
  if (s == "replay") return TraceKind::ReplayFile;
  throw std::invalid_argument("unknown trace kind: " + s);
}

std::string to_string(TraceKind k) {
  switch (k) {
    case TraceKind::UniformRandom: return "uniform";
    case TraceKind::Zipf: return "zipf";
    case TraceKind::AdversarialSet: return "adversarial";
    case TraceKind::ReplayFile: return "replay";
  }
  return "uniform";
}

}  // namespace

TieBreak tie_break_from_string(const std::string& s) {
  if (s == "random") return TieBreak::Random;
  if (s == "skew0") return TieBreak::AlwaysSkew0;
  throw std::invalid_argument("unknown tie_break: " + s + " (expected random|skew0)");
}

Selection selection_from_string(const std::string& s) {
  if (s == "load-aware") return Selection::LoadAware;
  if (s == "random-skew") return Selection::RandomSkew;
  if (s == "single-choice") return Selection::SingleChoice;
  throw std::invalid_argument("unknown selection: " + s);
}

std::string to_string(TieBreak tb) {
  return tb == TieBreak::Random ? "random" : "skew0";
}

std::string to_string(Selection s) {
  switch (s) {
    case Selection::LoadAware: return "load-aware";
    case Selection::RandomSkew: return "random-skew";
    case Selection::SingleChoice: return "single-choice";
  }
  return "load-aware";
}

void ExperimentConfig::validate() const {
  if (model != "mirage" && model != "random-skew" && model != "vway" && model != "set-assoc" &&
      model != "ballsim" && model != "analytic")
    throw std::invalid_argument("unknown model: " + model);
  geometry.validate();
  if (model == "ballsim") ballsim.validate();
  if (model == "mirage" || model == "random-skew" || model == "vway" || model == "set-assoc")
    trace.validate();
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  read_field(j, "model", cfg.model);
  read_field(j, "seed", cfg.seed);
  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    read_field(g, "sets_per_skew", cfg.geometry.sets_per_skew);
    read_field(g, "skews", cfg.geometry.skews);
    read_field(g, "base_ways_per_skew", cfg.geometry.base_ways_per_skew);
    read_field(g, "extra_ways_per_skew", cfg.geometry.extra_ways_per_skew);
    read_field(g, "line_bytes", cfg.geometry.line_bytes);
    read_field(g, "phys_addr_bits", cfg.geometry.phys_addr_bits);
  }
  if (j.contains("max_relocations") && !j.at("max_relocations").is_null())
    cfg.max_relocations = j.at("max_relocations").get<uint32_t>();
  if (j.contains("tie_break")) cfg.tie_break = tie_break_from_string(j.at("tie_break"));
  read_field(j, "vway_identity", cfg.vway_identity);
  if (j.contains("trace")) {
    const auto& t = j.at("trace");
    if (t.contains("kind")) cfg.trace.kind = trace_kind_from_string(t.at("kind"));
    read_field(t, "length", cfg.trace.length);
    read_field(t, "address_space_bits", cfg.trace.address_space_bits);
    read_field(t, "zipf_exponent", cfg.trace.zipf_exponent);
    read_field(t, "target_set", cfg.trace.target_set);
    read_field(t, "target_sets", cfg.trace.target_sets);
    read_field(t, "path", cfg.trace.replay_path);
    if (t.contains("sdid")) {
      const auto& s = t.at("sdid");
      if (s.contains("uniform"))
        cfg.trace.sdid.uniform_count = s.at("uniform").get<uint16_t>();
      else if (s.contains("fixed"))
        cfg.trace.sdid.fixed_value = s.at("fixed").get<uint8_t>();
    }
    if (t.contains("seed"))
      cfg.trace.seed = t.at("seed").get<uint64_t>();
    else
      cfg.trace.seed = derive_stream_seed(cfg.seed, kTraceStream);
  } else {
    cfg.trace.seed = derive_stream_seed(cfg.seed, kTraceStream);
  }
  if (j.contains("ballsim")) {
    const auto& b = j.at("ballsim");
    read_field(b, "buckets_per_skew", cfg.ballsim.buckets_per_skew);
    read_field(b, "skews", cfg.ballsim.skews);
    read_field(b, "balls", cfg.ballsim.balls);
    read_field(b, "bucket_capacity", cfg.ballsim.bucket_capacity);
    if (b.contains("selection"))
      cfg.ballsim.selection = selection_from_string(b.at("selection"));
    if (b.contains("tie_break"))
      cfg.ballsim.tie_break = tie_break_from_string(b.at("tie_break"));
    read_field(b, "relocation_attempts", cfg.ballsim.relocation_attempts);
    read_field(b, "throws", cfg.ballsim.throws);
    read_field(b, "warmup_throws", cfg.ballsim.warmup_throws);
    read_field(b, "sample_interval", cfg.ballsim.sample_interval);
    read_field(b, "trials", cfg.ballsim_trials);
  }
  if (j.contains("analytic")) {
    const auto& a = j.at("analytic");
    read_field(a, "p0", cfg.analytic.p0);
    read_field(a, "load_ratio", cfg.analytic.load_ratio);
    read_field(a, "n_max", cfg.analytic.n_max);
    read_field(a, "switch_threshold", cfg.analytic.switch_threshold);
    read_field(a, "capacity", cfg.analytic.capacity);
    read_field(a, "sets_per_skew", cfg.analytic.sets_per_skew);
    read_field(a, "max_relocation_attempts", cfg.analytic.max_relocation_attempts);
    read_field(a, "installs_per_second", cfg.analytic.installs_per_second);
  }
  cfg.validate();
  return cfg;
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["model"] = cfg.model;
  j["seed"] = cfg.seed;
  j["geometry"] = {{"sets_per_skew", cfg.geometry.sets_per_skew},
                   {"skews", cfg.geometry.skews},
                   {"base_ways_per_skew", cfg.geometry.base_ways_per_skew},
                   {"extra_ways_per_skew", cfg.geometry.extra_ways_per_skew},
                   {"line_bytes", cfg.geometry.line_bytes},
                   {"phys_addr_bits", cfg.geometry.phys_addr_bits}};
  if (cfg.max_relocations)
    j["max_relocations"] = *cfg.max_relocations;
  else
    j["max_relocations"] = nullptr;
  j["tie_break"] = to_string(cfg.tie_break);
  if (cfg.model == "vway") j["vway_identity"] = cfg.vway_identity;
  if (cfg.model == "mirage" || cfg.model == "random-skew" || cfg.model == "vway" ||
      cfg.model == "set-assoc") {
    nlohmann::ordered_json t;
    t["kind"] = to_string(cfg.trace.kind);
    t["length"] = cfg.trace.length;
    t["address_space_bits"] = cfg.trace.address_space_bits;
    if (cfg.trace.kind == TraceKind::Zipf) t["zipf_exponent"] = cfg.trace.zipf_exponent;
    if (cfg.trace.kind == TraceKind::AdversarialSet) {
      t["target_set"] = cfg.trace.target_set;
      t["target_sets"] = cfg.trace.target_sets;
    }
    if (cfg.trace.kind == TraceKind::ReplayFile) t["path"] = cfg.trace.replay_path;
    if (cfg.trace.sdid.uniform_count > 0)
      t["sdid"] = {{"uniform", cfg.trace.sdid.uniform_count}};
    else
      t["sdid"] = {{"fixed", cfg.trace.sdid.fixed_value}};
    t["seed"] = cfg.trace.seed;
    j["trace"] = t;
  }
  if (cfg.model == "ballsim") {
    j["ballsim"] = {{"buckets_per_skew", cfg.ballsim.buckets_per_skew},
                    {"skews", cfg.ballsim.skews},
                    {"balls", cfg.ballsim.balls},
                    {"bucket_capacity", cfg.ballsim.bucket_capacity},
                    {"selection", to_string(cfg.ballsim.selection)},
                    {"tie_break", to_string(cfg.ballsim.tie_break)},
                    {"relocation_attempts", cfg.ballsim.relocation_attempts},
                    {"throws", cfg.ballsim.throws},
                    {"warmup_throws", cfg.ballsim.warmup_throws},
                    {"sample_interval", cfg.ballsim.sample_interval},
                    {"trials", cfg.ballsim_trials}};
  }
  if (cfg.model == "analytic") {
    j["analytic"] = {{"p0", cfg.analytic.p0},
                     {"load_ratio", cfg.analytic.load_ratio},
                     {"n_max", cfg.analytic.n_max},
                     {"switch_threshold", cfg.analytic.switch_threshold},
                     {"capacity", cfg.analytic.capacity},
                     {"sets_per_skew", cfg.analytic.sets_per_skew},
                     {"max_relocation_attempts", cfg.analytic.max_relocation_attempts},
                     {"installs_per_second", cfg.analytic.installs_per_second}};
  }
  return j;
}

namespace {

ExperimentReport run_cache_model(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.model = cfg.model;
  rep.seed = cfg.seed;
  rep.has_counters = true;

  TraceSpec tspec = cfg.trace;
  TraceStream stream(tspec);
  const uint64_t cache_seed = derive_stream_seed(cfg.seed, kCacheStream);

  if (cfg.model == "set-assoc") {
    SetAssocLru cache(cfg.geometry);
    TraceRecord rec;
    while (stream.next(rec)) cache.install(LineAddress(rec.addr), SecurityDomainId(rec.sdid));
    rep.counters = cache.counters();
  } else {
    std::unique_ptr<MirageCache> cache;
    if (cfg.model == "vway") {
      cache = make_vway(cfg.geometry, cfg.vway_identity, cache_seed);
    } else {
      auto fn = PrinceIndexFn::from_seed(derive_stream_seed(cfg.seed, kKeyStream),
                                         cfg.geometry.skews);
      if (cfg.model == "random-skew") {
        cache = make_random_skew(cfg.geometry, std::move(fn), cache_seed);
      } else {
        MirageCacheConfig mc;
        mc.geometry = cfg.geometry;
        mc.tie_break = cfg.tie_break;
        mc.max_relocations = cfg.max_relocations;
        cache = std::make_unique<MirageCache>(mc, std::move(fn), cache_seed);
      }
    }

    // Chunked pipeline: encode blocks, derive both skew indices through the
    // batched cipher kernel, then drive the cache.
    const uint32_t skews = cache->geometry().skews;
    const uint32_t sets = cache->geometry().sets_per_skew;
    constexpr size_t kChunk = 8192;
    std::vector<TraceRecord> recs(kChunk);
    std::vector<uint64_t> blocks(kChunk);
    std::vector<uint32_t> idx[2] = {std::vector<uint32_t>(kChunk),
                                    std::vector<uint32_t>(kChunk)};
    for (;;) {
      size_t n = 0;
      while (n < kChunk && stream.next(recs[n])) ++n;
      if (n == 0) break;
      for (size_t i = 0; i < n; ++i)
        blocks[i] = encode_block(SecurityDomainId(recs[i].sdid), LineAddress(recs[i].addr));
      for (uint32_t s = 0; s < skews; ++s)
        derive_index_batch(cache->index_fn(), s, std::span<const uint64_t>(blocks.data(), n),
                           std::span<uint32_t>(idx[s].data(), n), sets);
      for (size_t i = 0; i < n; ++i) {
        const uint32_t two[2] = {idx[0][i], skews == 2 ? idx[1][i] : 0};
        cache->install_at(LineAddress(recs[i].addr), SecurityDomainId(recs[i].sdid),
                          std::span<const uint32_t>(two, skews));
      }
      if (n < kChunk) break;
    }
    rep.counters = cache->counters();
  }

  if (rep.counters.set_associative_evictions > 0)
    rep.installs_per_sae = static_cast<double>(rep.counters.misses) /
                           static_cast<double>(rep.counters.set_associative_evictions);
  nlohmann::ordered_json res;
  res["trace_length"] = stream.length();
  rep.results = res;
  return rep;
}

ExperimentReport run_ballsim_model(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.model = "ballsim";
  rep.seed = cfg.seed;
  ballsim::SpillStats stats = ballsim::run_parallel(cfg.ballsim, cfg.ballsim_trials, cfg.seed);
  nlohmann::ordered_json res;
  res["throws"] = stats.throws;
  res["spills"] = stats.spills;
  if (stats.spills > 0)
    res["installs_per_spill"] = stats.installs_per_spill();
  else
    res["installs_per_spill"] = nullptr;
  res["occupancy_samples"] = stats.occupancy_samples;
  res["occupancy_histogram"] = stats.occupancy_histogram;
  res["relocation_attempt_histogram"] = stats.relocation_attempt_histogram;
  res["relocation_failures"] = stats.relocation_failures;
  rep.results = res;
  return rep;
}

ExperimentReport run_analytic_model(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.model = "analytic";
  rep.seed = cfg.seed;
  const AnalyticConfig& a = cfg.analytic;
  const analytic::SteadyState st =
      analytic::steady_state(a.p0, a.load_ratio, a.n_max, a.switch_threshold);

  nlohmann::ordered_json res;
  nlohmann::ordered_json occ = nlohmann::ordered_json::array();
  for (size_t n = 0; n < st.probs.size(); ++n) {
    nlohmann::ordered_json row;
    row["n"] = n;
    if (st.probs[n] > 0)
      row["prob"] = st.probs[n];
    else
      row["prob"] = nullptr;
    row["log10_prob"] = st.log10_probs[n];
    occ.push_back(row);
  }
  res["occupancy"] = occ;
  res["balance_residual"] = analytic::max_balance_residual(st);

  const double base = analytic::installs_per_sae(st, a.capacity);
  res["capacity"] = a.capacity;
  res["spill_probability"] = analytic::spill_probability(st, a.capacity);
  res["installs_per_sae"] = base;
  res["log10_installs_per_sae"] = analytic::log10_installs_per_sae(st, a.capacity);

  nlohmann::ordered_json reloc = nlohmann::ordered_json::array();
  for (uint32_t n = 0; n <= a.max_relocation_attempts; ++n) {
    const double installs = analytic::installs_per_sae_with_relocation(base, n, a.sets_per_skew);
    const analytic::Duration d = analytic::time_per_sae(installs, a.installs_per_second);
    reloc.push_back({{"attempts", n},
                     {"installs_per_sae", installs},
                     {"seconds_per_sae", d.seconds},
                     {"years_per_sae", d.years}});
  }
  res["relocation"] = reloc;
  rep.results = res;
  return rep;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  if (cfg.model == "ballsim") {
    rep = run_ballsim_model(cfg);
  } else if (cfg.model == "analytic") {
    rep = run_analytic_model(cfg);
  } else {
    rep = run_cache_model(cfg);
  }
  rep.config = config_to_json(cfg);
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace mirage
