#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "precaution/random.hpp"

using precaution::derive_seed;
using precaution::Rng;

TEST_CASE("derived seeds are deterministic and spread") {
  CHECK(derive_seed(7, 0) == derive_seed(7, 0));
  CHECK(derive_seed(7, 0) != derive_seed(7, 1));
  CHECK(derive_seed(7, 0) != derive_seed(8, 0));
  CHECK(derive_seed(7, "probe") == derive_seed(7, "probe"));
  CHECK(derive_seed(7, "probe") != derive_seed(7, "certify"));
  std::set<std::uint64_t> seen;
  for (std::uint64_t k = 0; k < 1000; ++k) seen.insert(derive_seed(1, k));
  CHECK(seen.size() == 1000);
}

TEST_CASE("fnv1a64 matches published vectors") {
  CHECK(precaution::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(precaution::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(precaution::fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("uniform draws stay in range and reproduce") {
  Rng a(42), b(42);
  for (int k = 0; k < 10000; ++k) {
    const double u = a.uniform01();
    CHECK(u == b.uniform01());
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  Rng c(3);
  for (int k = 0; k < 10000; ++k) {
    const double u = c.uniform_open01();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    const double v = c.uniform(-2.0, 5.0);
    REQUIRE(v >= -2.0);
    REQUIRE(v < 5.0);
    REQUIRE(c.index(7) < 7);
  }
}

TEST_CASE("simplex draws are distributions with uniform marginal mean") {
  Rng rng(11);
  const std::size_t m = 4;
  std::vector<double> mean(m, 0.0);
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const auto p = rng.simplex_uniform(m);
    REQUIRE(p.size() == m);
    const double s = std::accumulate(p.begin(), p.end(), 0.0);
    REQUIRE(std::abs(s - 1.0) < 1e-12);
    for (std::size_t i = 0; i < m; ++i) {
      REQUIRE(p[i] >= 0.0);
      mean[i] += p[i] / n;
    }
  }
  for (double v : mean) CHECK(v == doctest::Approx(0.25).epsilon(0.02));
}
