#include "doctest.h"
#include "grasp/rng.hpp"

#include <cmath>
#include <set>

using grasp::RandomStream;

TEST_CASE("same seed and stream reproduce the sequence") {
  RandomStream a(1234, 7);
  RandomStream b(1234, 7);
  for (std::uint64_t i = 0; i < 100; ++i) {
    CHECK(a.bits(i) == b.bits(i));
    CHECK(a.uniform(i) == b.uniform(i));
  }
}

TEST_CASE("draws are order-free") {
  RandomStream a(99, 0);
  const double u5 = a.uniform(5);
  (void)a.uniform(0);
  (void)a.uniform(100);
  CHECK(a.uniform(5) == u5);
}

TEST_CASE("distinct seeds and streams decorrelate") {
  RandomStream a(1, 0), b(2, 0), c(1, 1);
  int same_ab = 0, same_ac = 0;
  for (std::uint64_t i = 0; i < 64; ++i) {
    same_ab += a.bits(i) == b.bits(i);
    same_ac += a.bits(i) == c.bits(i);
  }
  CHECK(same_ab == 0);
  CHECK(same_ac == 0);
}

TEST_CASE("split streams differ from parent and each other") {
  RandomStream root(42, 0);
  RandomStream s0 = root.split(0);
  RandomStream s1 = root.split(1);
  std::set<std::uint64_t> words;
  for (std::uint64_t i = 0; i < 32; ++i) {
    words.insert(root.bits(i));
    words.insert(s0.bits(i));
    words.insert(s1.bits(i));
  }
  CHECK(words.size() == 96);
}

TEST_CASE("uniform range and first two moments") {
  RandomStream a(2024, 3);
  const int n = 20000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = a.uniform(static_cast<std::uint64_t>(i));
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sq += u * u;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  // 5 sigma on the mean of n uniforms: 5 / sqrt(12 n)
  CHECK(std::fabs(mean - 0.5) < 5.0 / std::sqrt(12.0 * n));
  CHECK(std::fabs(var - 1.0 / 12.0) < 5e-3);
}

TEST_CASE("interval mapping") {
  RandomStream a(7, 0);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = a.uniform(i, -3.0, 5.0);
    REQUIRE(u >= -3.0);
    REQUIRE(u < 5.0);
  }
}
