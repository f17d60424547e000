#ifndef MIRAGE_TRACE_HPP
#define MIRAGE_TRACE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mirage/rng.hpp"

namespace mirage {

enum class TraceKind { UniformRandom, Zipf, AdversarialSet, ReplayFile };

// SDID assignment for generated records: a fixed domain, or uniform over
// [0, uniform_count) when uniform_count > 0.
struct SdidRule {
  uint8_t fixed_value = 0;
  uint16_t uniform_count = 0;
};

struct TraceSpec {
  TraceKind kind = TraceKind::UniformRandom;
  uint64_t length = 0;
  uint32_t address_space_bits = 30;
  double zipf_exponent = 1.0;
  // AdversarialSet: addresses congruent to target_set modulo target_sets, so
  // a known low-bits mapping sends every record to one set.
  uint64_t target_set = 0;
  uint32_t target_sets = 16384;
  std::string replay_path;
  SdidRule sdid;
  uint64_t seed = 1;

  void validate() const;
};

struct TraceRecord {
  uint64_t addr = 0;
  uint8_t sdid = 0;
};

// Deterministic pull-based generator; large traces never materialize.
class TraceStream {
 public:
  explicit TraceStream(const TraceSpec& spec);

  uint64_t length() const { return length_; }
  bool next(TraceRecord& out);
  void reset();

 private:
  uint64_t draw_address();

  TraceSpec spec_;
  Xoshiro256pp rng_;
  uint64_t pos_ = 0;
  uint64_t length_ = 0;
  std::vector<double> zipf_cdf_;
  std::vector<TraceRecord> replay_;
};

std::vector<TraceRecord> generate_trace(const TraceSpec& spec);

// Replay file format: one record per line, `hex-line-address <space> sdid`,
// `#` starts a comment. Parse errors carry the offending line number.
std::vector<TraceRecord> load_replay_file(const std::string& path);
void write_replay_file(const std::string& path, std::span<const TraceRecord> records);

}  // namespace mirage

#endif  // MIRAGE_TRACE_HPP
