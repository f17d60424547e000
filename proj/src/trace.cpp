#include "mirage/trace.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mirage {

void TraceSpec::validate() const {
  if (kind != TraceKind::ReplayFile && length == 0)
    throw std::invalid_argument("trace length must be >= 1");
  if (address_space_bits == 0 || address_space_bits > 40)
    throw std::invalid_argument("address_space_bits must be in [1, 40]");
  if (kind == TraceKind::Zipf) {
    if (!(zipf_exponent > 0.0)) throw std::invalid_argument("zipf exponent must be > 0");
    if (address_space_bits > 22)
      throw std::invalid_argument("zipf traces support at most 22 address bits");
  }
  if (kind == TraceKind::AdversarialSet) {
    if (target_sets == 0 || !std::has_single_bit(target_sets))
      throw std::invalid_argument("target_sets must be a power of two");
    if (target_set >= target_sets) throw std::invalid_argument("target_set out of range");
  }
  if (kind == TraceKind::ReplayFile && replay_path.empty())
    throw std::invalid_argument("replay trace needs a path");
}

TraceStream::TraceStream(const TraceSpec& spec) : spec_(spec), rng_(spec.seed) {
  spec_.validate();
  if (spec_.kind == TraceKind::Zipf) {
    const uint64_t n = uint64_t{1} << spec_.address_space_bits;
    zipf_cdf_.resize(n);
    double acc = 0.0;
    for (uint64_t r = 0; r < n; ++r) {
      acc += std::pow(static_cast<double>(r + 1), -spec_.zipf_exponent);
      zipf_cdf_[r] = acc;
    }
    for (auto& v : zipf_cdf_) v /= acc;
  } else if (spec_.kind == TraceKind::ReplayFile) {
    replay_ = load_replay_file(spec_.replay_path);
  }
  length_ = spec_.kind == TraceKind::ReplayFile ? replay_.size() : spec_.length;
}

void TraceStream::reset() {
  pos_ = 0;
  rng_ = Xoshiro256pp(spec_.seed);
}

uint64_t TraceStream::draw_address() {
  switch (spec_.kind) {
    case TraceKind::UniformRandom:
      return rng_.next_below(uint64_t{1} << spec_.address_space_bits);
    case TraceKind::Zipf: {
      const double u = rng_.next_double();
      const auto it = std::lower_bound(zipf_cdf_.begin(), zipf_cdf_.end(), u);
      return static_cast<uint64_t>(it - zipf_cdf_.begin());
    }
    case TraceKind::AdversarialSet:
      // Distinct addresses, all in the target set of the known mapping.
      return spec_.target_set + pos_ * spec_.target_sets;
    case TraceKind::ReplayFile:
      break;
  }
  return 0;
}

bool TraceStream::next(TraceRecord& out) {
  if (pos_ >= length_) return false;
  if (spec_.kind == TraceKind::ReplayFile) {
    out = replay_[pos_++];
    return true;
  }
  out.addr = draw_address();
  out.sdid = spec_.sdid.uniform_count > 0
                 ? static_cast<uint8_t>(rng_.next_below(spec_.sdid.uniform_count))
                 : spec_.sdid.fixed_value;
  ++pos_;
  return true;
}

std::vector<TraceRecord> generate_trace(const TraceSpec& spec) {
  TraceStream stream(spec);
  std::vector<TraceRecord> out;
  out.reserve(stream.length());
  TraceRecord rec;
  while (stream.next(rec)) out.push_back(rec);
  return out;
}

std::vector<TraceRecord> load_replay_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open replay file: " + path);
  std::vector<TraceRecord> out;
  std::string line;
  uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::string addr_tok;
    if (!(ss >> addr_tok)) continue;  // blank or comment-only line
    uint64_t addr = 0;
    try {
      size_t used = 0;
      addr = std::stoull(addr_tok, &used, 16);
      if (used != addr_tok.size()) throw std::invalid_argument(addr_tok);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": bad hex line address '" + addr_tok + "'");
    }
    unsigned sdid = 0;
    if (!(ss >> sdid) || sdid > 255) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": bad or missing sdid (expected 0-255)");
    }
    std::string extra;
    if (ss >> extra) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": trailing token '" + extra + "'");
    }
    out.push_back({addr, static_cast<uint8_t>(sdid)});
  }
  return out;
}

void write_replay_file(const std::string& path, std::span<const TraceRecord> records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[32];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%llx %u\n", static_cast<unsigned long long>(r.addr),
                  static_cast<unsigned>(r.sdid));
    out << buf;
  }
}

}  // namespace mirage
