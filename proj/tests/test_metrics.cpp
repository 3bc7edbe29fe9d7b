#include <cmath>
#include <set>
#include <sstream>

#include "chaosgan/error.hpp"
#include "chaosgan/metrics.hpp"
#include "chaosgan/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace chaosgan;

namespace {

std::vector<double> random_image(std::uint64_t seed, std::size_t n) {
  Rng r(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = r.uniform(-1.0, 1.0);
  return v;
}

// Smooth random image: sum of a few random plane waves, scaled into [-1, 1].
std::vector<double> smooth_image(std::uint64_t seed, std::size_t h, std::size_t w) {
  Rng r(seed);
  std::vector<double> v(h * w, 0.0);
  for (int k = 0; k < 4; ++k) {
    const double fx = r.uniform(-0.4, 0.4);
    const double fy = r.uniform(-0.4, 0.4);
    const double ph = r.uniform(0.0, 6.28);
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) v[y * w + x] += 0.2 * std::sin(fx * x + fy * y + ph);
    }
  }
  for (auto& x : v) x += r.uniform(-0.15, 0.15);
  return v;
}

GanConfig small_config() {
  GanConfig c;
  c.image_height = 16;
  c.image_width = 16;
  c.generator_hidden = {32};
  c.discriminator_hidden = {16};
  c.seed = 4;
  return c;
}

GanModel small_model() {
  GanModel m = initialize_model(small_config());
  for (auto& l : m.generator.layers) l.weight *= 20.0;  // visible latent dependence
  return m;
}

}  // namespace

TEST_CASE("pearson basics") {
  const auto p = random_image(1, 64);
  CHECK(pearson(p, p) == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> neg(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) neg[i] = 0.3 - p[i];
  CHECK(pearson(p, neg) == doctest::Approx(-1.0).epsilon(1e-12));
  const std::vector<double> a{0, 1, 2, 3};
  const std::vector<double> b{1, 3, 5, 7};
  CHECK(pearson(a, b) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("pearson is affine invariant") {
  const auto p = random_image(2, 100);
  const auto q = random_image(3, 100);
  const double base = pearson(p, q);
  CHECK(std::abs(base - oracle::pearson(p, q)) < 1e-12);
  std::vector<double> scaled(q.size());
  std::vector<double> flipped(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    scaled[i] = 3.5 * q[i] - 0.25;
    flipped[i] = -2.0 * q[i] + 1.0;
  }
  CHECK(std::abs(pearson(p, scaled) - base) < 1e-12);
  CHECK(std::abs(pearson(scaled, p) - base) < 1e-12);
  CHECK(std::abs(pearson(p, flipped) + base) < 1e-12);
}

TEST_CASE("pearson constant-image conventions") {
  const auto p = random_image(4, 16);
  const std::vector<double> c(16, 0.3);
  CHECK(pearson(p, c) == 0.0);
  CHECK(pearson(c, p) == 0.0);
  CHECK_THROWS_AS(pearson(c, c), MetricError);
  CHECK_THROWS_AS(pearson(p, std::vector<double>(15, 0.0)), MetricError);
}

TEST_CASE("make_neighbors keeps the prefix") {
  const auto z = random_image(5, 100);
  ProximityConfig cfg;
  cfg.neighbors = 7;

  cfg.fixed_prefix = 100;
  const LatentMatrix all = make_neighbors(z, cfg, 1);
  for (std::size_t l = 0; l < 7; ++l) {
    for (std::size_t i = 0; i < 100; ++i) REQUIRE(all(l, i) == z[i]);
  }

  cfg.fixed_prefix = 90;
  const LatentMatrix ninety = make_neighbors(z, cfg, 1);
  for (std::size_t l = 0; l < 7; ++l) {
    for (std::size_t i = 0; i < 90; ++i) REQUIRE(ninety(l, i) == z[i]);
    std::size_t diff = 0;
    for (std::size_t i = 90; i < 100; ++i) {
      diff += ninety(l, i) != z[i];
      REQUIRE(std::abs(ninety(l, i)) <= 1.0);
    }
    CHECK(diff == 10);
  }

  cfg.fixed_prefix = 0;
  const auto other = random_image(6, 100);
  CHECK(make_neighbors(z, cfg, 9) == make_neighbors(other, cfg, 9));
  CHECK_FALSE(make_neighbors(z, cfg, 9) == make_neighbors(z, cfg, 10));
}

TEST_CASE("proximity similarity endpoints") {
  const GanModel m = small_model();
  ProximityConfig cfg;
  cfg.references = 6;
  cfg.neighbors = 5;
  cfg.seed = 3;

  cfg.fixed_prefix = 100;
  const ProximityResult same = proximity_similarity(m, cfg);
  CHECK(same.value == 1.0);
  CHECK(same.cells.size() == 30);

  cfg.fixed_prefix = 0;
  const LatentSource refs(default_reference_source(cfg));
  const LatentMatrix ref_rows = refs.stream(1).next_batch(cfg.references);
  const ProximityResult zero = proximity_similarity(m, cfg);
  CHECK(std::abs(zero.value - oracle::proximity_fixed0(m, cfg, ref_rows)) < 1e-12);
  CHECK(zero.value < 1.0);

  cfg.fixed_prefix = 90;
  const ProximityResult a = proximity_similarity(m, cfg);
  const ProximityResult b = proximity_similarity(m, cfg);
  CHECK(a.value == b.value);
  CHECK(a.value > zero.value);
  double mean = 0.0;
  for (double v : a.per_reference) mean += v;
  CHECK(mean / 6.0 == doctest::Approx(a.value).epsilon(1e-12));
}

TEST_CASE("proximity with K = L = 1 is a single pearson call") {
  const GanModel m = small_model();
  ProximityConfig cfg;
  cfg.references = 1;
  cfg.neighbors = 1;
  cfg.seed = 8;
  const LatentSource refs(default_reference_source(cfg));
  const LatentMatrix z = refs.stream(1).next_batch(1);
  const LatentMatrix n = make_neighbors(z.row(0), cfg, neighbor_stream_seed(cfg, 0));
  const double expect = pearson(generate(m, z).image(0), generate(m, n).image(0));
  CHECK(proximity_similarity(m, cfg).value == expect);
}

TEST_CASE("proximity on a zero-weight model is an error") {
  GanModel m = initialize_model(small_config());
  for (auto& l : m.generator.layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
  ProximityConfig cfg;
  cfg.references = 2;
  cfg.neighbors = 2;
  CHECK_THROWS_AS(proximity_similarity(m, cfg), MetricError);
}

TEST_CASE("ssim identities") {
  const auto x = smooth_image(1, 16, 16);
  const auto y = smooth_image(2, 16, 16);
  const ImageView vx{x, 16, 16};
  const ImageView vy{y, 16, 16};
  CHECK(std::abs(ssim(vx, vx) - 1.0) < 1e-9);
  CHECK(ssim(vx, vy) == doctest::Approx(ssim(vy, vx)).epsilon(1e-14));
  CHECK(ssim(vx, vy) < 1.0);

  const std::vector<double> ca(16 * 16, -0.4);
  const std::vector<double> cb(16 * 16, 0.3);
  // Shifted to [0, 2]: a = 0.6, b = 1.3.
  const double a = 0.6;
  const double b = 1.3;
  const double c1 = 0.02 * 0.02;
  CHECK(ssim({ca, 16, 16}, {cb, 16, 16}) == doctest::Approx((2 * a * b + c1) / (a * a + b * b + c1)).epsilon(1e-12));

  const std::vector<double> tiny(10 * 10, 0.0);
  CHECK_THROWS_AS(ssim({tiny, 10, 10}, {tiny, 10, 10}), MetricError);
  CHECK_THROWS_AS(ms_ssim({tiny, 10, 10}, {tiny, 10, 10}), MetricError);
}

TEST_CASE("ms_ssim scale count") {
  const MsSsimConfig c;
  CHECK(ms_ssim_scales(11, 11, c) == 1);
  CHECK(ms_ssim_scales(16, 16, c) == 1);
  CHECK(ms_ssim_scales(22, 22, c) == 2);
  CHECK(ms_ssim_scales(64, 64, c) == 3);
  CHECK(ms_ssim_scales(176, 200, c) == 5);
  CHECK(ms_ssim_scales(1000, 1000, c) == 5);
}

TEST_CASE("ms_ssim equals ssim with one scale") {
  const auto x = smooth_image(3, 16, 16);
  auto y = x;
  const auto noise = random_image(4, 16 * 16);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.7 * y[i] + 0.2 * noise[i];
  const double s = ssim({x, 16, 16}, {y, 16, 16});
  CHECK(s > 0.0);
  CHECK(ms_ssim({x, 16, 16}, {y, 16, 16}) == doctest::Approx(s).epsilon(1e-14));

  // Anti-correlated images clamp to zero.
  std::vector<double> neg(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
  CHECK(ssim({x, 16, 16}, {neg, 16, 16}) < 0.0);
  CHECK(ms_ssim({x, 16, 16}, {neg, 16, 16}) == 0.0);
}

TEST_CASE("ms_ssim matches the direct-window reference on 64x64 pairs") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto x = smooth_image(10 + s, 64, 64);
    auto y = smooth_image(20 + s, 64, 64);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.6 * x[i] + 0.4 * y[i];
    const double got = ms_ssim({x, 64, 64}, {y, 64, 64});
    CHECK(std::abs(got - oracle::ms_ssim(x, y, 64, 64)) < 1e-9);
    CHECK(got == doctest::Approx(ms_ssim({y, 64, 64}, {x, 64, 64})).epsilon(1e-14));
    CHECK(std::abs(ms_ssim({x, 64, 64}, {x, 64, 64}) - 1.0) < 1e-9);
    CHECK(got > 0.0);
    CHECK(got < 1.0);
  }
}

TEST_CASE("colour ms_ssim uses luminance") {
  const auto x = smooth_image(5, 16, 16);
  const auto y = smooth_image(6, 16, 16);
  std::vector<double> cx;
  std::vector<double> cy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      cx.push_back(x[i]);
      cy.push_back(y[i]);
    }
  }
  CHECK(ms_ssim({cx, 16, 16, 3}, {cy, 16, 16, 3}) == doctest::Approx(ms_ssim({x, 16, 16}, {y, 16, 16})).epsilon(1e-12));
}

TEST_CASE("pair sampling is distinct, ordered and reproducible") {
  const auto pairs = sample_pairs(50, 300, 7);
  CHECK(pairs.size() == 300);
  std::set<std::pair<std::size_t, std::size_t>> unique(pairs.begin(), pairs.end());
  CHECK(unique.size() == 300);
  for (const auto& [i, j] : pairs) {
    CHECK(i < j);
    CHECK(j < 50);
  }
  CHECK(pairs == sample_pairs(50, 300, 7));
  CHECK(pairs != sample_pairs(50, 300, 8));
  CHECK(sample_pairs(4, 6, 1).size() == 6);
  CHECK_THROWS(sample_pairs(4, 7, 1));
}

TEST_CASE("diversity") {
  const GanModel m = small_model();
  const LatentSource src(SourceSpec::uniform(3));
  DiversityConfig cfg;
  cfg.image_count = 40;
  cfg.pair_count = 30;
  cfg.trials = 3;
  cfg.seed = 2;
  const DiversityResult r = diversity(m, cfg, src);
  CHECK(r.per_trial.size() == 3);
  CHECK(r.value >= 0.0);
  CHECK(r.value <= 1.0);
  CHECK(r.value == diversity(m, cfg, src).value);

  DiversityConfig two;
  two.image_count = 2;
  two.pair_count = 1;
  two.trials = 1;
  const ImageBatch img = generate(m, src.stream(1).next_batch(2));
  const double expect = 1.0 - ms_ssim({img.image(0), 16, 16}, {img.image(1), 16, 16});
  CHECK(diversity(m, two, src).value == doctest::Approx(expect).epsilon(1e-14));

  GanModel flat = m;
  flat.generator.layers.back().weight.setZero();
  CHECK(diversity(flat, cfg, src).value == doctest::Approx(0.0).epsilon(1e-12));

  DiversityConfig bad = cfg;
  bad.pair_count = 10000;
  CHECK_THROWS_AS(diversity(m, bad, src), ConfigError);
}

TEST_CASE("metric CSV writers") {
  ProximityResult p;
  p.value = 0.5;
  p.cells = {{0, 0, 0.25}, {0, 1, 0.75}};
  std::ostringstream po;
  write_proximity_csv(p, po);
  CHECK(po.str() == "k,l,r\n1,1,0.25\n1,2,0.75\nmean,,0.5\n");
  DiversityResult d;
  d.value = 0.25;
  d.similarity = {0.75};
  d.per_trial = {0.25};
  std::ostringstream dout;
  write_diversity_csv(d, dout);
  CHECK(dout.str() == "trial,similarity,diversity\n1,0.75,0.25\nmean,0.75,0.25\n");
}
