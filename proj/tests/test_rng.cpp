#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <vector>

#include "meshqos/rng.hpp"

using namespace meshqos;

TEST_CASE("same seed, same stream") {
  Rng a(12345);
  Rng b(12345);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("derived seeds separate by salt") {
  const std::uint64_t base = 42;
  CHECK(derive_seed(base, "traffic/1") == derive_seed(base, "traffic/1"));
  CHECK(derive_seed(base, "traffic/1") != derive_seed(base, "traffic/2"));
  CHECK(derive_seed(base, "traffic/1") != derive_seed(base, "sim"));
  CHECK(derive_seed(base, "sim") != derive_seed(base + 1, "sim"));
}

TEST_CASE("uniform01 stays in the half-open unit interval") {
  Rng rng(7);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform01();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    sum += x;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("uniform_int covers the inclusive range evenly") {
  Rng rng(11);
  std::array<int, 10> counts{};
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const std::int64_t v = rng.uniform_int(0, 9);
    REQUIRE(v >= 0);
    REQUIRE(v <= 9);
    ++counts[static_cast<std::size_t>(v)];
  }
  // Chi-squared against uniform, 9 degrees of freedom; 27.88 is the
  // 0.999 quantile, so a correct generator fails this once in a
  // thousand reseedings and the seed here is fixed.
  const double expected = n / 10.0;
  double chi2 = 0.0;
  for (int c : counts) {
    chi2 += (c - expected) * (c - expected) / expected;
  }
  CHECK(chi2 < 27.88);

  CHECK(rng.uniform_int(5, 5) == 5);
  CHECK(rng.uniform_int(-3, -3) == -3);
}

TEST_CASE("weighted_index follows the weights") {
  Rng rng(23);
  const std::vector<double> weights = {1.0, 1.0, 1.0};
  std::array<int, 3> counts{};
  const int n = 30000;
  for (int i = 0; i < n; ++i) {
    counts[rng.weighted_index(weights)]++;
  }
  // 13.8155 is the chi-squared 0.999 quantile at 2 degrees of freedom.
  const double expected = n / 3.0;
  double chi2 = 0.0;
  for (int c : counts) {
    chi2 += (c - expected) * (c - expected) / expected;
  }
  CHECK(chi2 < 13.8155);
}

TEST_CASE("weighted_index with uneven weights") {
  Rng rng(29);
  const std::vector<double> weights = {2.0, 1.0};
  int first = 0;
  const int n = 30000;
  for (int i = 0; i < n; ++i) {
    if (rng.weighted_index(weights) == 0) ++first;
  }
  const double frac = static_cast<double>(first) / n;
  CHECK(frac == doctest::Approx(2.0 / 3.0).epsilon(0.02));
}

TEST_CASE("single-entry weights always return index zero") {
  Rng rng(31);
  const std::vector<double> weights = {5.0};
  for (int i = 0; i < 100; ++i) {
    CHECK(rng.weighted_index(weights) == 0);
  }
}
