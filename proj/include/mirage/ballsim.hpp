#ifndef MIRAGE_BALLSIM_HPP
#define MIRAGE_BALLSIM_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "mirage/policies.hpp"

namespace mirage::ballsim {

// Buckets-and-balls security experiment: each bucket is a cache set, each
// throw removes one ball uniformly at random (global eviction) and inserts
// one via the configured placement policy. A spill is an insertion that finds
// every choice at capacity with the relocation budget exhausted.
struct BallSimConfig {
  uint32_t buckets_per_skew = 16384;
  uint32_t skews = 2;
  uint64_t balls = 262144;
  uint32_t bucket_capacity = 14;  // W
  Selection selection = Selection::LoadAware;
  TieBreak tie_break = TieBreak::Random;
  uint32_t relocation_attempts = 0;
  uint64_t throws = 0;
  uint64_t warmup_throws = 0;  // run but keep out of the statistics
  uint64_t sample_interval = 64;  // occupancy histogram period, 0 = off
  uint64_t seed = 1;

  uint64_t total_buckets() const { return uint64_t{buckets_per_skew} * skews; }
  void validate() const;
};

struct SpillStats {
  uint64_t throws = 0;
  uint64_t spills = 0;
  uint64_t occupancy_samples = 0;
  // Buckets holding N balls, accumulated over samples; index 0..capacity.
  std::vector<uint64_t> occupancy_histogram;
  // Conflicts resolved on the a-th relocation attempt (index a, 1-based).
  std::vector<uint64_t> relocation_attempt_histogram;
  uint64_t relocation_failures = 0;

  double installs_per_spill() const {
    return spills ? static_cast<double>(throws) / static_cast<double>(spills)
                  : std::numeric_limits<double>::infinity();
  }
  void merge(const SpillStats& other);
};

SpillStats run_trial(const BallSimConfig& config);

// Independent trials with decorrelated seeds, merged in trial order; the
// result does not depend on thread interleaving.
SpillStats run_parallel(const BallSimConfig& config, uint32_t trials, uint64_t base_seed,
                        unsigned threads = 0);

struct P0Estimate {
  double p0 = 0.0;
  double std_err = 0.0;
  uint64_t bucket_samples = 0;
};

// Time-averaged probability of an empty bucket.
P0Estimate measure_p0(const BallSimConfig& config);

// Insertion-only contrast experiment: max bucket load after throwing `balls`
// balls into uncapped buckets under the given policy.
uint32_t max_load(uint64_t balls, uint32_t buckets_per_skew, uint32_t skews,
                  Selection selection, uint64_t seed);

}  // namespace mirage::ballsim

#endif  // MIRAGE_BALLSIM_HPP
