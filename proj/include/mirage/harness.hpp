#ifndef MIRAGE_HARNESS_HPP
#define MIRAGE_HARNESS_HPP

#include <optional>
#include <string>

#include "json.hpp"
#include "mirage/ballsim.hpp"
#include "mirage/cache.hpp"
#include "mirage/report.hpp"
#include "mirage/trace.hpp"

namespace mirage {

struct AnalyticConfig {
  double p0 = 4e-6;
  double load_ratio = 8.0;
  uint32_t n_max = 20;
  double switch_threshold = 0.01;
  uint32_t capacity = 14;
  uint32_t sets_per_skew = 16384;
  uint32_t max_relocation_attempts = 3;
  double installs_per_second = 1e9;
};

// A full experiment description: one model plus the knobs it needs. Loadable
// from a single JSON document; command-line flags override fields.
struct ExperimentConfig {
  std::string model = "mirage";  // mirage|random-skew|vway|set-assoc|ballsim|analytic
  uint64_t seed = 1;
  CacheGeometry geometry;
  std::optional<uint32_t> max_relocations;
  TieBreak tie_break = TieBreak::Random;
  bool vway_identity = false;
  TraceSpec trace;
  ballsim::BallSimConfig ballsim;
  uint32_t ballsim_trials = 1;
  AnalyticConfig analytic;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);

ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Helpers shared with the CLI.
TieBreak tie_break_from_string(const std::string& s);
Selection selection_from_string(const std::string& s);
std::string to_string(TieBreak tb);
std::string to_string(Selection s);

}  // namespace mirage

#endif  // MIRAGE_HARNESS_HPP
