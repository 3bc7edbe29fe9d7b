#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "chaosgan/error.hpp"
#include "chaosgan/latent_source.hpp"
#include "chaosgan/stats.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace chaosgan;

namespace {

TraceSet constant_trace_set(std::int8_t value, std::size_t length) {
  std::vector<ChaosTrace> traces;
  for (int m = 1; m <= 100; ++m) {
    for (int c = 1; c <= 4; ++c) {
      ChaosTrace t;
      t.channel_id = c;
      t.measurement_index = m;
      t.samples.assign(length, value);
      traces.push_back(std::move(t));
    }
  }
  return TraceSet(std::move(traces));
}

}  // namespace

TEST_CASE("pack_u32 endpoints") {
  CHECK(pack_u32(0, 0, 0, 0) == -1.0);
  CHECK(pack_u32(128, 0, 0, 0) == 0.0);
  CHECK(pack_u32(255, 255, 255, 255) == 4294967295.0 / 2147483648.0 - 1.0);
}

TEST_CASE("pack_u32 is monotone in big-endian byte order") {
  CHECK(pack_u32(0, 0, 0, 1) > pack_u32(0, 0, 0, 0));
  CHECK(pack_u32(0, 0, 1, 0) > pack_u32(0, 0, 0, 255));
  CHECK(pack_u32(1, 0, 0, 0) > pack_u32(0, 255, 255, 255));
}

TEST_CASE("time-domain arrangement matches index arithmetic") {
  const TraceSet set = oracle::random_trace_set(11, 400);
  for (int si : {10, 20, 30, 50}) {
    const LatentMatrix m = build_time_domain(set, si);
    CHECK(m.rows() == 400 / static_cast<std::size_t>(si / 10));
    const auto expect = oracle::time_domain(set, si);
    CHECK(std::equal(m.values().begin(), m.values().end(), expect.begin(), expect.end()));
  }
}

TEST_CASE("stride s equals every s-th sample of the stride-1 stream") {
  const TraceSet set = oracle::random_trace_set(12, 300);
  const LatentMatrix one = build_time_domain(set, 10);
  const LatentMatrix five = build_time_domain(set, 50);
  for (std::size_t t = 0; t < five.rows(); ++t) {
    for (std::size_t i = 0; i < 100; ++i) REQUIRE(five(t, i) == one(5 * t, i));
  }
}

TEST_CASE("space-domain arrangement follows consecutive windows") {
  const TraceSet set = oracle::random_trace_set(13, 300);
  const LatentMatrix m = build_space_domain(set, 10);
  CHECK(m.rows() == 300);  // 3 rows per measurement
  const auto expect = oracle::space_domain(set, 10);
  CHECK(std::equal(m.values().begin(), m.values().end(), expect.begin(), expect.end()));
  // Row 2 starts at sample 101 of measurement 1; row 4 is the first row of measurement 2.
  const auto p = packed_sequences(set, 10);
  CHECK(m(1, 0) == p[0][100]);
  CHECK(m(3, 0) == p[1][0]);
  CHECK(m(3, 99) == p[1][99]);
}

TEST_CASE("all-zero bytes give -1 everywhere") {
  const TraceSet set = constant_trace_set(0, 100);
  const LatentMatrix m = build_time_domain(set, 10);
  CHECK(std::all_of(m.values().begin(), m.values().end(), [](double v) { return v == -1.0; }));
}

TEST_CASE("packing preconditions") {
  const TraceSet few = oracle::random_trace_set(1, 10, 50);
  CHECK_THROWS_AS(build_time_domain(few, 10), ConfigError);
  const TraceSet set = oracle::random_trace_set(1, 10);
  CHECK_THROWS_AS(build_time_domain(set, 15), ConfigError);
  CHECK_THROWS_AS(build_time_domain(set, 0), ConfigError);
}

TEST_CASE("uniform sampling") {
  const LatentMatrix a = sample_uniform(5, 10000);
  CHECK(a == sample_uniform(5, 10000));
  CHECK_FALSE(a == sample_uniform(6, 10000));
  double mean = 0.0;
  for (double v : a.values()) {
    REQUIRE(v >= -1.0);
    REQUIRE(v <= 1.0);
    mean += v;
  }
  CHECK(std::abs(mean / static_cast<double>(a.values().size())) < 0.005);
}

TEST_CASE("edge-shifted normal") {
  CHECK(normal_edge_transform(0.0) == -1.0);
  CHECK(normal_edge_transform(-0.05) == doctest::Approx(0.95).epsilon(1e-15));
  CHECK(normal_edge_transform(3.0) == 1.0);
  CHECK(normal_edge_transform(-3.0) == -1.0);
  const LatentMatrix m = sample_normal_edge(3, 0.2, 10000);
  CHECK(m == sample_normal_edge(3, 0.2, 10000));
  std::size_t edge = 0;
  for (double v : m.values()) {
    REQUIRE(std::abs(v) <= 1.0);
    if (std::abs(v) >= 0.6) ++edge;
  }
  CHECK(static_cast<double>(edge) / 1e6 > 0.95);
}

TEST_CASE("surrogate shuffle is a seeded permutation") {
  std::vector<double> x(1000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  const auto a = surrogate_shuffle(x, 1);
  CHECK(a == surrogate_shuffle(x, 1));
  CHECK(a != surrogate_shuffle(x, 2));
  CHECK(a != x);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == x);
}

TEST_CASE("surrogate shuffle of packed sequences keeps lengths and values") {
  PackedSequences seqs{{1, 2, 3}, {4, 5}, {6}};
  const auto s = surrogate_shuffle(seqs, 9);
  REQUIRE(s.size() == 3);
  CHECK(s[0].size() == 3);
  CHECK(s[1].size() == 2);
  CHECK(s[2].size() == 1);
  std::vector<double> all;
  for (const auto& q : s) all.insert(all.end(), q.begin(), q.end());
  std::sort(all.begin(), all.end());
  CHECK(all == std::vector<double>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("stream trial offsets follow the 128 (n - 1) rule") {
  std::vector<double> v(1000 * 100);
  for (std::size_t r = 0; r < 1000; ++r) v[r * 100] = static_cast<double>(r);
  auto m = std::make_shared<const LatentMatrix>(std::move(v), SourceSpec::chaos_time(10));
  LatentStream s1(m, 1);
  CHECK(s1.next_batch(128)(0, 0) == 0.0);  // row 1, one-based
  LatentStream s3(m, 3);
  CHECK(s3.next_batch(128)(0, 0) == 256.0);  // row 257, one-based
  const auto a = s3.next_batch(10);
  CHECK(a(0, 0) == 384.0);
  CHECK(s3.cursor() == 394);
}

TEST_CASE("exhausted stream raises instead of wrapping") {
  auto m = std::make_shared<const LatentMatrix>(std::vector<double>(300 * 100), SourceSpec::chaos_time(10));
  LatentStream s(m, 2);
  CHECK(s.remaining() == 172);
  s.next_batch(100);
  try {
    s.next_batch(100);
    FAIL("expected SourceExhausted");
  } catch (const SourceExhausted& e) {
    CHECK(std::string(e.what()).rfind("source exhausted", 0) == 0);
  }
}

TEST_CASE("pseudorandom streams are deterministic and trial-specific") {
  const SourceSpec spec = SourceSpec::uniform(4);
  LatentStream a(spec, 1);
  LatentStream b(spec, 1);
  LatentStream c(spec, 2);
  const auto x = a.next_batch(5);
  CHECK(x == b.next_batch(5));
  CHECK_FALSE(x == c.next_batch(5));
  // Batches concatenate: 2 + 3 rows equal 5 rows.
  LatentStream d(spec, 1);
  const auto p = d.next_batch(2);
  const auto q = d.next_batch(3);
  CHECK(p(1, 7) == x(1, 7));
  CHECK(q(2, 99) == x(4, 99));
  CHECK_THROWS_AS(LatentStream(SourceSpec::chaos_time(10), 1), ConfigError);
}

TEST_CASE("labels round-trip") {
  for (const char* l : {"rand", "randn0.1", "randn0.2", "chaos_time_si10", "chaos_time_si50",
                        "chaos_space_si10", "surrogate_time_si30", "surrogate_space_si20"}) {
    CHECK(parse_source_label(l).label() == l);
  }
  CHECK_THROWS_AS(parse_source_label("bogus"), ConfigError);
}

TEST_CASE("latent CSV and binary round-trips") {
  const LatentMatrix m = sample_uniform(1, 7);
  std::stringstream csv;
  write_latent_csv(m, csv);
  CHECK(read_latent_csv(csv) == m);
  std::stringstream bin;
  write_latent_binary(m, bin);
  CHECK(bin.str().substr(0, 4) == "LATM");
  CHECK(bin.str().size() == 16 + 7 * 100 * 8);
  CHECK(read_latent_binary(bin) == m);
  std::stringstream bad("LATX");
  CHECK_THROWS(read_latent_binary(bad));
}

TEST_CASE("chaos arrangements place correlation on different axes") {
  SyntheticChaosConfig c;
  c.length = 20000;
  const auto set = std::make_shared<const TraceSet>(synthesize_trace_set(c));
  const LatentMatrix time = build_time_domain(*set, 10);
  const LatentMatrix space = build_space_domain(*set, 10);

  const AutocorrResult tt = autocorr_time(time, 50);
  const AutocorrResult ts = autocorr_space(time, 50);
  const double band_t = white_noise_band(time.rows());
  const double band_s = white_noise_band(100);
  CHECK(std::abs(tt.value(5)) > 3 * band_t);
  CHECK(ts.max_abs_nonzero() < 2 * band_s);

  const AutocorrResult st = autocorr_time(space, 50);
  const AutocorrResult ss = autocorr_space(space, 50);
  CHECK(std::abs(ss.value(5)) > 3 * band_s);
  CHECK(st.max_abs_nonzero() < 2 * band_t);
}

TEST_CASE("packed chaos histogram is edge-peaked") {
  SyntheticChaosConfig c;
  c.length = 5000;
  const LatentMatrix m = build_time_domain(synthesize_trace_set(c), 10);
  std::size_t edge = 0;
  std::size_t centre = 0;
  for (double v : m.values()) {
    if (std::abs(v) >= 0.8) ++edge;
    if (std::abs(v) <= 0.2) ++centre;
  }
  CHECK(edge > centre);
}

TEST_CASE("every source kind stays inside [-1, 1]") {
  SyntheticChaosConfig c;
  c.length = 2000;
  const auto set = std::make_shared<const TraceSet>(synthesize_trace_set(c));
  for (const SourceSpec& spec :
       {SourceSpec::uniform(1), SourceSpec::normal_edge(0.2, 1), SourceSpec::chaos_time(10),
        SourceSpec::chaos_space(20), SourceSpec::surrogate_time(10, 3),
        SourceSpec::surrogate_space(10, 3)}) {
    const LatentSource src(spec, set);
    const LatentMatrix m = src.stream(1).next_batch(500);
    CHECK(std::all_of(m.values().begin(), m.values().end(),
                      [](double v) { return v >= -1.0 && v <= 1.0; }));
  }
}
