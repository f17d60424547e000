#include "mirage/analytic.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace mirage::analytic {

namespace {
constexpr double kSecondsPerYear = 3.1536e7;
// Below this the squaring in the tail form nears the subnormal range; the
// recursion continues in log10 space.
constexpr double kLogSpaceBelow = 1e-140;
}  // namespace

SteadyState steady_state(double p0, double load_ratio, uint32_t n_max,
                         double switch_threshold) {
  if (!(p0 > 0.0) || !(p0 < 1.0)) throw std::invalid_argument("p0 must lie in (0, 1)");
  if (!(load_ratio > 0.0)) throw std::invalid_argument("load_ratio must be positive");
  if (n_max == 0) throw std::invalid_argument("n_max must be >= 1");

  SteadyState st;
  st.p0 = p0;
  st.load_ratio = load_ratio;
  st.switch_threshold = switch_threshold;
  st.tail_start = n_max + 1;
  st.probs.assign(n_max + 1, 0.0);
  st.log10_probs.assign(n_max + 1, 0.0);
  st.cumulative.assign(n_max + 1, 0.0);

  st.probs[0] = p0;
  st.log10_probs[0] = std::log10(p0);
  st.cumulative[0] = p0;

  bool tail = false;
  for (uint32_t n = 0; n < n_max; ++n) {
    const double pn = st.probs[n];
    const double lpn = st.log10_probs[n];
    if (!tail && n > 0 && st.log10_probs[n] < st.log10_probs[n - 1] && pn < switch_threshold) {
      tail = true;
      st.tail_start = n + 1;
    }
    const double factor = load_ratio / static_cast<double>(n + 1);
    if (!tail) {
      const double above = std::max(0.0, 1.0 - st.cumulative[n]);
      const double next = factor * (pn * pn + 2.0 * pn * above);
      st.probs[n + 1] = next;
      st.log10_probs[n + 1] = std::log10(next);
    } else if (pn >= kLogSpaceBelow) {
      const double next = factor * pn * pn;
      st.probs[n + 1] = next;
      st.log10_probs[n + 1] = std::log10(next);
    } else {
      const double lnext = 2.0 * lpn + std::log10(factor);
      st.log10_probs[n + 1] = lnext;
      st.probs[n + 1] = lnext > -300.0 ? std::pow(10.0, lnext) : 0.0;
    }
    st.cumulative[n + 1] = st.cumulative[n] + st.probs[n + 1];
  }
  return st;
}

double spill_probability(const SteadyState& state, uint32_t capacity) {
  if (capacity >= state.probs.size())
    throw std::invalid_argument("capacity exceeds computed levels");
  const double p = state.probs[capacity];
  return p * p;
}

double log10_spill_probability(const SteadyState& state, uint32_t capacity) {
  if (capacity >= state.log10_probs.size())
    throw std::invalid_argument("capacity exceeds computed levels");
  return 2.0 * state.log10_probs[capacity];
}

double installs_per_sae(const SteadyState& state, uint32_t capacity) {
  return 1.0 / spill_probability(state, capacity);
}

double log10_installs_per_sae(const SteadyState& state, uint32_t capacity) {
  return -log10_spill_probability(state, capacity);
}

double installs_per_sae_with_relocation(double base_installs_per_sae, uint32_t attempts,
                                        uint32_t sets_per_skew) {
  return base_installs_per_sae * std::pow(static_cast<double>(sets_per_skew),
                                          static_cast<double>(attempts));
}

Duration time_per_sae(double installs_per_sae, double installs_per_second) {
  if (!(installs_per_second > 0.0)) throw std::invalid_argument("rate must be positive");
  Duration d;
  d.seconds = installs_per_sae / installs_per_second;
  d.years = d.seconds / kSecondsPerYear;
  return d;
}

double max_balance_residual(const SteadyState& state) {
  double worst = 0.0;
  for (uint32_t n = 0; n + 1 < state.probs.size(); ++n) {
    const double pn = state.probs[n];
    const double pn1 = state.probs[n + 1];
    if (pn == 0.0 || pn1 == 0.0) {
      // Underflowed levels: the tail recursion is exact in log space.
      continue;
    }
    double up;
    if (n + 1 < state.tail_start) {
      const double above = std::max(0.0, 1.0 - state.cumulative[n]);
      up = pn * pn + 2.0 * pn * above;
    } else {
      up = pn * pn;
    }
    const double down = pn1 * static_cast<double>(n + 1) / state.load_ratio;
    if (up == 0.0 && down == 0.0) continue;
    worst = std::max(worst, std::fabs(up - down) / std::max(up, down));
  }
  return worst;
}

StorageReport storage_report(const CacheGeometry& geometry, StorageVariant variant) {
  geometry.validate();
  StorageReport r;
  r.variant = variant;
  r.data_bits = geometry.line_bytes * 8;
  r.data_entries = geometry.data_entries();

  const uint32_t baseline_ways = geometry.skews * geometry.base_ways_per_skew;
  const uint64_t baseline_sets = geometry.data_entries() / baseline_ways;
  const uint32_t baseline_index_bits = std::bit_width(baseline_sets - 1);

  auto total_kb = [](uint64_t entries, uint64_t bits) {
    return static_cast<double>(entries * bits) / 8.0 / 1024.0;
  };

  if (variant == StorageVariant::Baseline) {
    r.tag_bits = geometry.line_addr_bits() - baseline_index_bits;
    r.status_bits = 2;
    r.tag_entries = geometry.data_entries();
    r.rptr_bits = 0;
  } else {
    CacheGeometry g = geometry;
    g.extra_ways_per_skew = variant == StorageVariant::Mirage75
                                ? (3 * geometry.base_ways_per_skew + 3) / 4
                                : (geometry.base_ways_per_skew + 1) / 2;
    r.tag_bits = g.line_addr_bits();
    r.status_bits = 2;
    r.fptr_bits = g.fptr_bits();
    r.sdid_bits = 8;
    r.tag_entries = g.tag_entries();
    r.rptr_bits = g.rptr_bits();
  }

  r.tag_bits_per_entry = r.tag_bits + r.status_bits + r.fptr_bits + r.sdid_bits;
  r.data_bits_per_entry = r.data_bits + r.rptr_bits;
  r.tag_store_kb = total_kb(r.tag_entries, r.tag_bits_per_entry);
  r.data_store_kb = total_kb(r.data_entries, r.data_bits_per_entry);
  r.total_kb = r.tag_store_kb + r.data_store_kb;

  const StorageReport base = variant == StorageVariant::Baseline
                                 ? r
                                 : storage_report(geometry, StorageVariant::Baseline);
  r.percent_of_baseline = 100.0 * r.total_kb / base.total_kb;
  return r;
}

}  // namespace mirage::analytic
