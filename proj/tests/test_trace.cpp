#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <vector>

#include "doctest.h"
#include "mirage/trace.hpp"
#include "support/stats.hpp"

using namespace mirage;

TEST_SUITE_BEGIN("trace");

TEST_CASE("uniform traces are reproducible under one seed") {
  TraceSpec spec;
  spec.length = 10;
  spec.seed = 123;
  const auto a = generate_trace(spec);
  const auto b = generate_trace(spec);
  REQUIRE(a.size() == 10);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].addr == b[i].addr);
    CHECK(a[i].sdid == b[i].sdid);
  }
  spec.seed = 124;
  const auto c = generate_trace(spec);
  bool any_diff = false;
  for (size_t i = 0; i < a.size(); ++i) any_diff |= a[i].addr != c[i].addr;
  CHECK(any_diff);
}

TEST_CASE("adversarial records share one set under the known mapping") {
  TraceSpec spec;
  spec.kind = TraceKind::AdversarialSet;
  spec.length = 1000;
  spec.target_set = 37;
  spec.target_sets = 256;
  const auto recs = generate_trace(spec);
  for (size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].addr % 256 == 37);
    if (i > 0) CHECK(recs[i].addr != recs[i - 1].addr);
  }
}

TEST_CASE("zipf rank-frequency slope is about -1") {
  TraceSpec spec;
  spec.kind = TraceKind::Zipf;
  spec.length = 2000000;
  spec.address_space_bits = 20;
  spec.zipf_exponent = 1.0;
  spec.seed = 9;
  std::vector<uint64_t> counts(1 << 20, 0);
  TraceStream stream(spec);
  TraceRecord rec;
  while (stream.next(rec)) counts[rec.addr]++;
  // Fit log(count) against log(rank) over well-populated ranks.
  std::vector<double> xs, ys;
  for (uint64_t rank = 1; rank <= 1000; ++rank) {
    if (counts[rank - 1] < 10) break;
    xs.push_back(std::log(static_cast<double>(rank)));
    ys.push_back(std::log(static_cast<double>(counts[rank - 1])));
  }
  REQUIRE(xs.size() >= 100);
  const double slope = teststats::ls_slope(xs, ys);
  CHECK(slope > -1.1);
  CHECK(slope < -0.9);
}

TEST_CASE("sdid assignment rules") {
  TraceSpec spec;
  spec.length = 1000;
  spec.sdid.fixed_value = 7;
  for (const auto& r : generate_trace(spec)) CHECK(r.sdid == 7);
  spec.sdid.uniform_count = 4;
  std::map<uint8_t, int> seen;
  for (const auto& r : generate_trace(spec)) seen[r.sdid]++;
  CHECK(seen.size() == 4);
}

TEST_CASE("replay files round-trip and report parse errors with line numbers") {
  const std::string path = "test_trace_replay.tmp";
  std::vector<TraceRecord> recs = {{0xabc, 1}, {0x40, 0}, {0xffffffffff, 255}};
  write_replay_file(path, recs);
  {
    std::ofstream app(path, std::ios::app);
    app << "# trailing comment\n\n";
  }
  const auto loaded = load_replay_file(path);
  REQUIRE(loaded.size() == recs.size());
  for (size_t i = 0; i < recs.size(); ++i) {
    CHECK(loaded[i].addr == recs[i].addr);
    CHECK(loaded[i].sdid == recs[i].sdid);
  }

  TraceSpec spec;
  spec.kind = TraceKind::ReplayFile;
  spec.replay_path = path;
  TraceStream stream(spec);
  CHECK(stream.length() == recs.size());

  {
    std::ofstream bad(path);
    bad << "abc 1\nzzz 2\n";
  }
  try {
    load_replay_file(path);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  {
    std::ofstream bad(path);
    bad << "abc 300\n";
  }
  CHECK_THROWS_AS(load_replay_file(path), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("spec validation") {
  TraceSpec spec;
  spec.length = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.length = 1;
  spec.kind = TraceKind::Zipf;
  spec.address_space_bits = 30;  // beyond the zipf table limit
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_SUITE_END();
