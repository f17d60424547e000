#ifndef MIRAGE_REPORT_HPP
#define MIRAGE_REPORT_HPP

#include <optional>
#include <string>

#include "json.hpp"
#include "mirage/cache.hpp"

namespace mirage {

inline constexpr int kReportSchemaVersion = 1;

// One experiment run. JSON and CSV renderings contain only seed-determined
// fields so identical configs produce byte-identical machine reports; wall
// time shows up in the human table only.
struct ExperimentReport {
  std::string model;
  uint64_t seed = 0;
  nlohmann::ordered_json config;
  nlohmann::ordered_json results;
  bool has_counters = false;
  CacheCounters counters;
  std::optional<double> installs_per_sae;
  double wall_seconds = 0.0;
};

std::string to_json_string(const ExperimentReport& report);
std::string to_csv_string(const ExperimentReport& report);
std::string to_table_string(const ExperimentReport& report);

std::string format_report(const ExperimentReport& report, const std::string& format);

}  // namespace mirage

#endif  // MIRAGE_REPORT_HPP
