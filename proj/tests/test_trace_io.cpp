#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "chaosgan/error.hpp"
#include "chaosgan/stats.hpp"
#include "chaosgan/trace_io.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace chaosgan;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("chaosgan_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream f(p, std::ios::binary);
  f << bytes;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("load_trace reinterprets bytes as two's complement") {
  const auto dir = temp_dir("twos");
  write_bytes(dir / "a.i8", std::string("\x00\x7F\x80\xFF", 4));
  const ChaosTrace t = load_trace({dir / "a.i8", 1, 1, 10, 4});
  REQUIRE(t.size() == 4);
  CHECK(t.samples[0] == 0);
  CHECK(t.samples[1] == 127);
  CHECK(t.samples[2] == -128);
  CHECK(t.samples[3] == -1);
}

TEST_CASE("load_trace reports path and field on failure") {
  const auto dir = temp_dir("errors");
  write_bytes(dir / "empty.i8", "");
  const auto empty = error_of([&] { load_trace({dir / "empty.i8", 1, 1, 10, 4}); });
  CHECK(empty.find("length mismatch") != std::string::npos);
  CHECK(empty.find("empty.i8") != std::string::npos);

  write_bytes(dir / "short.i8", "abc");
  const auto mismatch = error_of([&] { load_trace({dir / "short.i8", 1, 1, 10, 4}); });
  CHECK(mismatch.find("length mismatch") != std::string::npos);
  CHECK(mismatch.find("'n'") != std::string::npos);

  const auto missing = error_of([&] { load_trace({dir / "nope.i8", 1, 1, 10, 4}); });
  CHECK(missing.find("nope.i8: file not found") != std::string::npos);
}

TEST_CASE("save(load(f)) is byte-identical") {
  const auto dir = temp_dir("roundtrip");
  std::string bytes;
  for (int i = 0; i < 256; ++i) bytes.push_back(static_cast<char>(i));
  write_bytes(dir / "in.i8", bytes);
  save_trace(load_trace({dir / "in.i8", 2, 3, 10, 256}), dir / "out.i8");
  CHECK(read_bytes(dir / "out.i8") == bytes);
}

TEST_CASE("manifest parsing") {
  std::istringstream good(
      "# comment\n"
      "path=a.i8\tchannel=1\tmeasurement=2\tsi_ps=10\tn=400\n");
  const auto m = parse_manifest(good, "/data", "m.tsv");
  REQUIRE(m.entries.size() == 1);
  CHECK(m.entries[0].path == fs::path("/data/a.i8"));
  CHECK(m.entries[0].measurement == 2);
  CHECK(m.entries[0].n == 400);

  std::istringstream missing("path=a.i8\tchannel=1\tmeasurement=1\tsi_ps=10\n");
  const auto msg = error_of([&] { parse_manifest(missing, "", "m.tsv"); });
  CHECK(msg == "m.tsv:1: missing field 'n'");

  std::istringstream bad("path=a.i8\tchannel=9\tmeasurement=1\tsi_ps=10\tn=4\n");
  CHECK(error_of([&] { parse_manifest(bad, "", "m.tsv"); }).find("'channel'") != std::string::npos);

  std::istringstream junk("path=a.i8\tchannel=x\tmeasurement=1\tsi_ps=10\tn=4\n");
  CHECK_THROWS_AS(parse_manifest(junk, "", "m.tsv"), TraceError);
}

TEST_CASE("manifest write/parse round-trip") {
  TraceManifest m;
  m.entries.push_back({"/base/x/ch1.i8", 1, 1, 10, 5});
  std::ostringstream out;
  write_manifest(m, out, "/base");
  CHECK(out.str() == "path=x/ch1.i8\tchannel=1\tmeasurement=1\tsi_ps=10\tn=5\n");
  std::istringstream in(out.str());
  CHECK(parse_manifest(in, "/base").entries[0].path == fs::path("/base/x/ch1.i8"));
}

TEST_CASE("synthetic trace is deterministic and zero-centered") {
  SyntheticChaosConfig c;
  c.length = 200000;
  const auto a = generate_synthetic_trace(c);
  const auto b = generate_synthetic_trace(c);
  CHECK(a.samples == b.samples);
  double mean = 0.0;
  for (auto s : a.samples) mean += s;
  mean /= static_cast<double>(a.size());
  CHECK(std::abs(mean) < 2.0);
  c.seed = 2;
  CHECK(generate_synthetic_trace(c).samples != a.samples);
}

TEST_CASE("synthetic trace has its negative autocorrelation extremum at the delay lag") {
  SyntheticChaosConfig c;  // defaults: delay 5, N = 10^6
  const auto t = generate_synthetic_trace(c);
  std::vector<double> x(t.samples.begin(), t.samples.end());
  const auto r = autocorrelation(x, 50);
  std::size_t best = 1;
  for (std::size_t k = 1; k <= 50; ++k) {
    if (r[k] < r[best]) best = k;
  }
  CHECK(best == c.delay_lag);
  CHECK(r[c.delay_lag] <= -0.05);
  for (std::size_t k = 5 * c.delay_lag + 1; k <= 50; ++k) CHECK(std::abs(r[k]) < 0.02);
}

TEST_CASE("no feedback means degenerate dynamics") {
  SyntheticChaosConfig c;
  c.length = 10000;
  c.feedback_strength = 0.0;
  CHECK(error_of([&] { generate_synthetic_trace(c); }).find("degenerate dynamics") != std::string::npos);
}

TEST_CASE("synthetic config validation") {
  SyntheticChaosConfig c;
  c.length = 5;
  c.delay_lag = 5;
  CHECK_THROWS_AS(c.validate(), TraceError);
}

TEST_CASE("trace set ordering, lookup and save/load") {
  const TraceSet set = oracle::random_trace_set(1, 64, 3);
  CHECK(set.channel_count() == 4);
  CHECK(set.measurement_count() == 3);
  CHECK(set.at(2, 3).channel_id == 2);
  CHECK(set.at(2, 3).measurement_index == 3);
  CHECK_THROWS(set.at(5, 1));

  const auto dir = temp_dir("set");
  save_trace_set(set, dir);
  const TraceSet back = load_trace_set(read_manifest(dir / "manifest.tsv"));
  for (int m = 1; m <= 3; ++m) {
    for (int c = 1; c <= 4; ++c) CHECK(back.at(c, m).samples == set.at(c, m).samples);
  }
}

TEST_CASE("trace set rejects unequal lengths and gaps") {
  ChaosTrace a;
  a.samples = {1, 2, 3};
  ChaosTrace b = a;
  b.channel_id = 2;
  b.samples = {1, 2};
  CHECK_THROWS_AS(TraceSet({a, b}), TraceError);
  ChaosTrace c = a;
  c.channel_id = 3;
  CHECK_THROWS_AS(TraceSet({a, c}), TraceError);
}
