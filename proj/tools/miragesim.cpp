#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mirage/analytic.hpp"
#include "mirage/harness.hpp"
#include "mirage/trace.hpp"

using namespace mirage;

namespace {

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  out << text;
}

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::string format = "table";
  std::optional<uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config; flags override fields");
  cmd->add_option("--out", o.out_path, "write the report here instead of stdout");
  cmd->add_option("--format", o.format, "json|csv|table")
      ->check(CLI::IsMember({"json", "csv", "table"}));
  cmd->add_option("--seed", o.seed, "experiment seed");
}

ExperimentConfig base_config(const CommonOpts& o, const std::string& model) {
  nlohmann::json j;
  if (!o.config_path.empty()) j = load_config_file(o.config_path);
  if (!j.contains("model")) j["model"] = model;
  ExperimentConfig cfg = config_from_json(j);
  if (o.seed) {
    cfg.seed = *o.seed;
    // Re-derive the trace seed unless the file pinned one explicitly.
    if (!(j.contains("trace") && j["trace"].contains("seed")))
      cfg.trace.seed = derive_stream_seed(cfg.seed, 0x74726163ULL);
  }
  return cfg;
}

void run_and_emit(const ExperimentConfig& cfg, const CommonOpts& o) {
  const ExperimentReport rep = run_experiment(cfg);
  emit(format_report(rep, o.format), o.out_path);
}

std::string storage_table(const CacheGeometry& g) {
  using analytic::StorageReport;
  using analytic::StorageVariant;
  const StorageReport base = analytic::storage_report(g, StorageVariant::Baseline);
  const StorageReport m75 = analytic::storage_report(g, StorageVariant::Mirage75);
  const StorageReport m50 = analytic::storage_report(g, StorageVariant::Mirage50);
  char buf[160];
  std::string out;
  auto row = [&](const char* name, double b, double a75, double a50) {
    std::snprintf(buf, sizeof buf, "%-24s %14.0f %14.0f %14.0f\n", name, b, a75, a50);
    out += buf;
  };
  std::snprintf(buf, sizeof buf, "%-24s %14s %14s %14s\n", "", "baseline", "75% extra",
                "50% extra");
  out += buf;
  row("tag bits/entry", static_cast<double>(base.tag_bits_per_entry),
      static_cast<double>(m75.tag_bits_per_entry), static_cast<double>(m50.tag_bits_per_entry));
  row("tag entries", static_cast<double>(base.tag_entries), static_cast<double>(m75.tag_entries),
      static_cast<double>(m50.tag_entries));
  row("tag store (KB)", base.tag_store_kb, m75.tag_store_kb, m50.tag_store_kb);
  row("data bits/entry", static_cast<double>(base.data_bits_per_entry),
      static_cast<double>(m75.data_bits_per_entry),
      static_cast<double>(m50.data_bits_per_entry));
  row("data entries", static_cast<double>(base.data_entries),
      static_cast<double>(m75.data_entries), static_cast<double>(m50.data_entries));
  row("data store (KB)", base.data_store_kb, m75.data_store_kb, m50.data_store_kb);
  row("total (KB)", base.total_kb, m75.total_kb, m50.total_kb);
  std::snprintf(buf, sizeof buf, "%-24s %13.1f%% %13.1f%% %13.1f%%\n", "vs baseline",
                base.percent_of_baseline, m75.percent_of_baseline, m50.percent_of_baseline);
  out += buf;
  return out;
}

nlohmann::ordered_json storage_json_one(const analytic::StorageReport& r, const char* name) {
  return {{"variant", name},
          {"tag_bits", r.tag_bits},
          {"status_bits", r.status_bits},
          {"fptr_bits", r.fptr_bits},
          {"sdid_bits", r.sdid_bits},
          {"tag_entries", r.tag_entries},
          {"tag_bits_per_entry", r.tag_bits_per_entry},
          {"tag_store_kb", r.tag_store_kb},
          {"data_bits", r.data_bits},
          {"rptr_bits", r.rptr_bits},
          {"data_entries", r.data_entries},
          {"data_bits_per_entry", r.data_bits_per_entry},
          {"data_store_kb", r.data_store_kb},
          {"total_kb", r.total_kb},
          {"percent_of_baseline", r.percent_of_baseline}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and analysis toolkit for fully associative randomized caches"};
  app.require_subcommand(1);

  // cachesim
  CommonOpts cache_opts;
  auto* cachesim = app.add_subcommand("cachesim", "trace-driven cache model run");
  add_common(cachesim, cache_opts);
  std::optional<std::string> model, trace_kind, replay_path;
  std::optional<uint64_t> length, target_set;
  std::optional<uint32_t> addr_bits, sets, base_ways, extra_ways, max_reloc, sdid_domains;
  std::optional<double> zipf_s;
  bool identity = false;
  cachesim->add_option("--model", model, "mirage|random-skew|vway|set-assoc");
  cachesim->add_option("--trace-kind", trace_kind, "uniform|zipf|adversarial|replay");
  cachesim->add_option("--length", length, "trace length");
  cachesim->add_option("--address-bits", addr_bits, "line-address space bits");
  cachesim->add_option("--zipf-exponent", zipf_s, "zipf exponent");
  cachesim->add_option("--target-set", target_set, "adversarial target set");
  cachesim->add_option("--replay", replay_path, "replay file path");
  cachesim->add_option("--sdid-domains", sdid_domains, "draw SDIDs uniformly over this many domains");
  cachesim->add_option("--sets-per-skew", sets, "sets per skew");
  cachesim->add_option("--base-ways", base_ways, "base ways per skew");
  cachesim->add_option("--extra-ways", extra_ways, "extra ways per skew");
  cachesim->add_option("--max-relocations", max_reloc, "relocation budget per conflict");
  cachesim->add_flag("--identity", identity, "vway only: known low-bits mapping");

  // ballsim
  CommonOpts ball_opts;
  auto* ballsim_cmd = app.add_subcommand("ballsim", "buckets-and-balls spill experiment");
  add_common(ballsim_cmd, ball_opts);
  std::optional<uint64_t> throws, balls, warmup, sample_interval;
  std::optional<uint32_t> capacity, buckets, trials, reloc_attempts;
  std::optional<std::string> selection, tie_break;
  ballsim_cmd->add_option("--throws", throws, "ball throws after initialization");
  ballsim_cmd->add_option("--balls", balls, "ball population");
  ballsim_cmd->add_option("--buckets-per-skew", buckets, "buckets per skew");
  ballsim_cmd->add_option("--capacity", capacity, "bucket capacity W");
  ballsim_cmd->add_option("--selection", selection, "load-aware|random-skew|single-choice");
  ballsim_cmd->add_option("--tie-break", tie_break, "random|skew0");
  ballsim_cmd->add_option("--relocations", reloc_attempts, "relocation attempts per conflict");
  ballsim_cmd->add_option("--warmup", warmup, "unrecorded warmup throws");
  ballsim_cmd->add_option("--sample-interval", sample_interval, "occupancy sampling period");
  ballsim_cmd->add_option("--trials", trials, "independent trials merged");

  // analytic
  CommonOpts ana_opts;
  auto* analytic_cmd = app.add_subcommand("analytic", "birth-death steady state and SAE rates");
  add_common(analytic_cmd, ana_opts);
  std::optional<double> p0, load_ratio, switch_thr, rate;
  std::optional<uint32_t> n_max, ana_capacity, ana_sets, ana_reloc;
  analytic_cmd->add_option("--p0", p0, "empty-bucket probability seeding the recursion");
  analytic_cmd->add_option("--load-ratio", load_ratio, "balls per bucket");
  analytic_cmd->add_option("--n-max", n_max, "highest occupancy level computed");
  analytic_cmd->add_option("--switch-threshold", switch_thr, "tail-form switch threshold");
  analytic_cmd->add_option("--capacity", ana_capacity, "bucket capacity W for the spill figure");
  analytic_cmd->add_option("--sets-per-skew", ana_sets, "sets per skew for relocation scaling");
  analytic_cmd->add_option("--relocations", ana_reloc, "max relocation attempts tabulated");
  analytic_cmd->add_option("--rate", rate, "installs per second for time conversion");

  // storage
  CommonOpts st_opts;
  auto* storage_cmd = app.add_subcommand("storage", "storage-overhead calculator");
  add_common(storage_cmd, st_opts);
  std::optional<uint32_t> st_sets, st_base, st_line, st_phys;
  storage_cmd->add_option("--sets-per-skew", st_sets, "sets per skew");
  storage_cmd->add_option("--base-ways", st_base, "base ways per skew");
  storage_cmd->add_option("--line-bytes", st_line, "line size in bytes");
  storage_cmd->add_option("--phys-bits", st_phys, "physical address bits");

  // trace-gen
  CommonOpts tg_opts;
  auto* tracegen = app.add_subcommand("trace-gen", "emit a synthetic trace as a replay file");
  add_common(tracegen, tg_opts);
  std::string tg_kind = "uniform";
  uint64_t tg_length = 1000;
  uint32_t tg_bits = 30;
  double tg_zipf = 1.0;
  uint64_t tg_target = 0;
  uint32_t tg_sets = 16384;
  uint32_t tg_domains = 0;
  tracegen->add_option("--kind", tg_kind, "uniform|zipf|adversarial");
  tracegen->add_option("--length", tg_length, "records to emit");
  tracegen->add_option("--address-bits", tg_bits, "line-address space bits");
  tracegen->add_option("--zipf-exponent", tg_zipf, "zipf exponent");
  tracegen->add_option("--target-set", tg_target, "adversarial target set");
  tracegen->add_option("--target-sets", tg_sets, "adversarial mapping modulus");
  tracegen->add_option("--sdid-domains", tg_domains, "uniform SDID domain count (0 = fixed 0)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cachesim) {
      ExperimentConfig cfg = base_config(cache_opts, "mirage");
      if (model) cfg.model = *model;
      if (trace_kind) {
        if (*trace_kind == "uniform") cfg.trace.kind = TraceKind::UniformRandom;
        else if (*trace_kind == "zipf") cfg.trace.kind = TraceKind::Zipf;
        else if (*trace_kind == "adversarial") cfg.trace.kind = TraceKind::AdversarialSet;
        else if (*trace_kind == "replay") cfg.trace.kind = TraceKind::ReplayFile;
        else throw std::runtime_error("unknown trace kind: " + *trace_kind);
      }
      if (length) cfg.trace.length = *length;
      if (addr_bits) cfg.trace.address_space_bits = *addr_bits;
      if (zipf_s) cfg.trace.zipf_exponent = *zipf_s;
      if (target_set) cfg.trace.target_set = *target_set;
      if (replay_path) cfg.trace.replay_path = *replay_path;
      if (sdid_domains) cfg.trace.sdid.uniform_count = static_cast<uint16_t>(*sdid_domains);
      if (sets) cfg.geometry.sets_per_skew = *sets;
      if (base_ways) cfg.geometry.base_ways_per_skew = *base_ways;
      if (extra_ways) cfg.geometry.extra_ways_per_skew = *extra_ways;
      if (max_reloc) cfg.max_relocations = *max_reloc;
      if (identity) cfg.vway_identity = true;
      if (cfg.trace.kind == TraceKind::AdversarialSet && !cachesim->count("--target-set"))
        cfg.trace.target_sets = cfg.geometry.sets_per_skew;
      run_and_emit(cfg, cache_opts);
    } else if (*ballsim_cmd) {
      ExperimentConfig cfg = base_config(ball_opts, "ballsim");
      cfg.model = "ballsim";
      if (throws) cfg.ballsim.throws = *throws;
      if (balls) cfg.ballsim.balls = *balls;
      if (buckets) cfg.ballsim.buckets_per_skew = *buckets;
      if (capacity) cfg.ballsim.bucket_capacity = *capacity;
      if (selection) cfg.ballsim.selection = selection_from_string(*selection);
      if (tie_break) cfg.ballsim.tie_break = tie_break_from_string(*tie_break);
      if (reloc_attempts) cfg.ballsim.relocation_attempts = *reloc_attempts;
      if (warmup) cfg.ballsim.warmup_throws = *warmup;
      if (sample_interval) cfg.ballsim.sample_interval = *sample_interval;
      if (trials) cfg.ballsim_trials = *trials;
      run_and_emit(cfg, ball_opts);
    } else if (*analytic_cmd) {
      ExperimentConfig cfg = base_config(ana_opts, "analytic");
      cfg.model = "analytic";
      if (p0) cfg.analytic.p0 = *p0;
      if (load_ratio) cfg.analytic.load_ratio = *load_ratio;
      if (n_max) cfg.analytic.n_max = *n_max;
      if (switch_thr) cfg.analytic.switch_threshold = *switch_thr;
      if (ana_capacity) cfg.analytic.capacity = *ana_capacity;
      if (ana_sets) cfg.analytic.sets_per_skew = *ana_sets;
      if (ana_reloc) cfg.analytic.max_relocation_attempts = *ana_reloc;
      if (rate) cfg.analytic.installs_per_second = *rate;
      run_and_emit(cfg, ana_opts);
    } else if (*storage_cmd) {
      CacheGeometry g;
      if (!st_opts.config_path.empty()) {
        ExperimentConfig cfg = config_from_json(load_config_file(st_opts.config_path));
        g = cfg.geometry;
      }
      if (st_sets) g.sets_per_skew = *st_sets;
      if (st_base) g.base_ways_per_skew = *st_base;
      if (st_line) g.line_bytes = *st_line;
      if (st_phys) g.phys_addr_bits = *st_phys;
      if (st_opts.format == "table") {
        emit(storage_table(g), st_opts.out_path);
      } else {
        nlohmann::ordered_json j;
        j["schema_version"] = kReportSchemaVersion;
        j["storage"] = nlohmann::ordered_json::array(
            {storage_json_one(analytic::storage_report(g, analytic::StorageVariant::Baseline),
                              "baseline"),
             storage_json_one(analytic::storage_report(g, analytic::StorageVariant::Mirage75),
                              "mirage75"),
             storage_json_one(analytic::storage_report(g, analytic::StorageVariant::Mirage50),
                              "mirage50")});
        emit(j.dump(2) + "\n", st_opts.out_path);
      }
    } else if (*tracegen) {
      TraceSpec spec;
      if (tg_kind == "uniform") spec.kind = TraceKind::UniformRandom;
      else if (tg_kind == "zipf") spec.kind = TraceKind::Zipf;
      else if (tg_kind == "adversarial") spec.kind = TraceKind::AdversarialSet;
      else throw std::runtime_error("unknown trace kind: " + tg_kind);
      spec.length = tg_length;
      spec.address_space_bits = tg_bits;
      spec.zipf_exponent = tg_zipf;
      spec.target_set = tg_target;
      spec.target_sets = tg_sets;
      spec.sdid.uniform_count = static_cast<uint16_t>(tg_domains);
      spec.seed = tg_opts.seed.value_or(1);
      const auto records = generate_trace(spec);
      if (tg_opts.out_path.empty()) {
        for (const auto& r : records) {
          char buf[32];
          std::snprintf(buf, sizeof buf, "%llx %u\n",
                        static_cast<unsigned long long>(r.addr),
                        static_cast<unsigned>(r.sdid));
          std::cout << buf;
        }
      } else {
        write_replay_file(tg_opts.out_path, records);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
