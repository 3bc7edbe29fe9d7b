#include <cmath>
#include <set>
#include <vector>

#include "chaosgan/rng.hpp"
#include "doctest.h"

using namespace chaosgan;

TEST_CASE("hash_label matches FNV-1a reference values") {
  CHECK(hash_label("") == 0xCBF29CE484222325ULL);
  CHECK(hash_label("a") == 0xAF63DC4C8601EC8CULL);
}

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("sequential draws equal random-access draws") {
  Rng a(42);
  const Rng b(42);
  for (std::uint64_t i = 0; i < 100; ++i) CHECK(a.next_u64() == b.u64_at(i));
  Rng c(42);
  c.seek(10);
  CHECK(c.uniform01() == b.uniform01_at(10));
  Rng d(42);
  const double g = d.normal();
  CHECK(g == b.normal_at(0));
  CHECK(d.counter() == 2);
}

TEST_CASE("uniform01 stays in [0, 1) and has mean 1/2") {
  Rng r(7);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("normal draws have unit variance") {
  Rng r(9);
  double s = 0.0;
  double ss = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double g = r.normal();
    s += g;
    ss += g * g;
  }
  const double mean = s / n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(ss / n - mean * mean - 1.0) < 0.02);
}

TEST_CASE("below is bounded and roughly uniform") {
  Rng r(3);
  std::vector<int> counts(10, 0);
  for (int i = 0; i < 100000; ++i) {
    const auto v = r.below(10);
    REQUIRE(v < 10);
    ++counts[v];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("split streams differ from the parent") {
  const Rng r(5);
  CHECK(r.split(1).u64_at(0) != r.u64_at(0));
  CHECK(r.split(1).u64_at(0) == r.split(1).u64_at(0));
}
