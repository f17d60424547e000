#ifndef MIRAGE_ANALYTIC_HPP
#define MIRAGE_ANALYTIC_HPP

#include <cstdint>
#include <vector>

#include "mirage/geometry.hpp"

namespace mirage::analytic {

// Steady state of the bucket-occupancy birth-death chain. Level N+1 follows
// from level N by equating the insertion rate (two-choice placement) with the
// removal rate (uniform random ball removal); past the peak, once Pr(n=N)
// drops below switch_threshold, the quadratic tail form takes over and the
// recursion continues in log space to dodge underflow.
struct SteadyState {
  double p0 = 0.0;
  double load_ratio = 8.0;
  double switch_threshold = 0.01;
  uint32_t tail_start = 0;  // first level computed by the tail form
  std::vector<double> probs;        // 0.0 where the value underflows a double
  std::vector<double> log10_probs;
  std::vector<double> cumulative;   // inclusive running sum (double domain)
};

SteadyState steady_state(double p0, double load_ratio, uint32_t n_max,
                         double switch_threshold = 0.01);

// Pr(spill) for a bucket of capacity W: the chance an insertion meets two
// buckets already holding W, i.e. Pr(n=W)^2.
double spill_probability(const SteadyState& state, uint32_t capacity);
double log10_spill_probability(const SteadyState& state, uint32_t capacity);
double installs_per_sae(const SteadyState& state, uint32_t capacity);
double log10_installs_per_sae(const SteadyState& state, uint32_t capacity);

// Failure of one relocation attempt is ~1/sets-per-skew, so n attempts
// stretch the base rate by sets_per_skew^n.
double installs_per_sae_with_relocation(double base_installs_per_sae, uint32_t attempts,
                                        uint32_t sets_per_skew);

struct Duration {
  double seconds = 0.0;
  double years = 0.0;
};
Duration time_per_sae(double installs_per_sae, double installs_per_second);

// Largest relative gap between the up-rate and down-rate implied by the
// computed probabilities (regime-consistent at every level).
double max_balance_residual(const SteadyState& state);

enum class StorageVariant { Baseline, Mirage75, Mirage50 };

struct StorageReport {
  StorageVariant variant = StorageVariant::Baseline;
  // Tag store.
  uint32_t tag_bits = 0;
  uint32_t status_bits = 0;
  uint32_t fptr_bits = 0;
  uint32_t sdid_bits = 0;
  uint64_t tag_entries = 0;
  uint64_t tag_bits_per_entry = 0;
  // Data store.
  uint32_t data_bits = 0;
  uint32_t rptr_bits = 0;
  uint64_t data_entries = 0;
  uint64_t data_bits_per_entry = 0;

  double tag_store_kb = 0.0;
  double data_store_kb = 0.0;
  double total_kb = 0.0;
  double percent_of_baseline = 0.0;
};

// Exact storage-bit arithmetic for the baseline set-associative design and
// the two extra-tag variants (75% and 50% extra tags over the base ways).
StorageReport storage_report(const CacheGeometry& geometry, StorageVariant variant);

}  // namespace mirage::analytic

#endif  // MIRAGE_ANALYTIC_HPP
