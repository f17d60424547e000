#include "mirage/report.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace mirage {

namespace {

nlohmann::ordered_json counters_json(const CacheCounters& c) {
  nlohmann::ordered_json j;
  j["accesses"] = c.accesses;
  j["hits"] = c.hits;
  j["misses"] = c.misses;
  j["global_evictions"] = c.global_evictions;
  j["set_associative_evictions"] = c.set_associative_evictions;
  j["filled_invalid"] = c.filled_invalid;
  j["relocation_attempts"] = c.relocation_attempts;
  j["relocations"] = c.relocations;
  j["writebacks"] = c.writebacks;
  return j;
}

}  // namespace

std::string to_json_string(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["model"] = report.model;
  j["seed"] = report.seed;
  j["config"] = report.config;
  if (report.has_counters) {
    j["counters"] = counters_json(report.counters);
    if (report.installs_per_sae)
      j["installs_per_sae"] = *report.installs_per_sae;
    else
      j["installs_per_sae"] = nullptr;
  }
  j["results"] = report.results;
  return j.dump(2) + "\n";
}

std::string to_csv_string(const ExperimentReport& report) {
  std::ostringstream out;
  if (report.has_counters) {
    out << "schema_version,model,seed,accesses,hits,misses,global_evictions,"
           "set_associative_evictions,filled_invalid,relocation_attempts,relocations,"
           "writebacks,installs_per_sae\n";
    const CacheCounters& c = report.counters;
    out << kReportSchemaVersion << ',' << report.model << ',' << report.seed << ',' << c.accesses
        << ',' << c.hits << ',' << c.misses << ',' << c.global_evictions << ','
        << c.set_associative_evictions << ',' << c.filled_invalid << ',' << c.relocation_attempts
        << ',' << c.relocations << ',' << c.writebacks << ',';
    if (report.installs_per_sae)
      out << *report.installs_per_sae;
    out << '\n';
    return out.str();
  }
  if (report.model == "ballsim") {
    out << "schema_version,model,seed,throws,spills,installs_per_spill\n";
    out << kReportSchemaVersion << ',' << report.model << ',' << report.seed << ','
        << report.results.value("throws", 0ULL) << ',' << report.results.value("spills", 0ULL)
        << ',';
    if (report.results.contains("installs_per_spill") &&
        report.results["installs_per_spill"].is_number())
      out << report.results["installs_per_spill"].get<double>();
    out << '\n';
    return out.str();
  }
  if (report.model == "analytic") {
    out << "n,prob,log10_prob\n";
    for (const auto& row : report.results["occupancy"]) {
      out << row["n"].get<uint64_t>() << ',';
      if (row["prob"].is_number()) out << row["prob"].get<double>();
      out << ',' << row["log10_prob"].get<double>() << '\n';
    }
    return out.str();
  }
  throw std::runtime_error("no CSV rendering for model " + report.model);
}

std::string to_table_string(const ExperimentReport& report) {
  std::ostringstream out;
  char buf[128];
  out << "model: " << report.model << "   seed: " << report.seed << '\n';
  if (report.has_counters) {
    const CacheCounters& c = report.counters;
    auto row = [&](const char* name, uint64_t v) {
      std::snprintf(buf, sizeof buf, "  %-26s %20llu\n", name,
                    static_cast<unsigned long long>(v));
      out << buf;
    };
    row("accesses", c.accesses);
    row("hits", c.hits);
    row("misses", c.misses);
    row("global evictions", c.global_evictions);
    row("set-associative evictions", c.set_associative_evictions);
    row("filled invalid data", c.filled_invalid);
    row("relocation attempts", c.relocation_attempts);
    row("relocations", c.relocations);
    row("writebacks", c.writebacks);
    if (report.installs_per_sae) {
      std::snprintf(buf, sizeof buf, "  %-26s %20.6g\n", "installs per SAE",
                    *report.installs_per_sae);
      out << buf;
    } else {
      std::snprintf(buf, sizeof buf, "  %-26s %20s\n", "installs per SAE", "n/a (no SAE)");
      out << buf;
    }
  } else {
    out << report.results.dump(2) << '\n';
  }
  std::snprintf(buf, sizeof buf, "  %-26s %20.3f\n", "wall time (s)", report.wall_seconds);
  out << buf;
  return out.str();
}

std::string format_report(const ExperimentReport& report, const std::string& format) {
  if (format == "json") return to_json_string(report);
  if (format == "csv") return to_csv_string(report);
  if (format == "table") return to_table_string(report);
  throw std::runtime_error("unknown format: " + format);
}

}  // namespace mirage
