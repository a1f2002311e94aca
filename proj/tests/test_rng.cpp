#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <thread>
#include <vector>

#include <levymix/parallel.hpp>
#include <levymix/rng.hpp>

#include "testutil.hpp"

using namespace levymix;

TEST_CASE("streams are pure functions of their key") {
  RngStream a(42, 7, StreamRole::path);
  RngStream b(42, 7, StreamRole::path);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct roles and replicates give distinct streams") {
  RngStream a(42, 7, StreamRole::path);
  RngStream b(42, 7, StreamRole::noise);
  RngStream c(42, 8, StreamRole::path);
  int equal_ab = 0, equal_ac = 0;
  for (int i = 0; i < 64; ++i) {
    const auto va = a.next_u64();
    if (va == b.next_u64()) ++equal_ab;
    if (va == c.next_u64()) ++equal_ac;
  }
  REQUIRE(equal_ab == 0);
  REQUIRE(equal_ac == 0);
}

TEST_CASE("uniform01 stays strictly inside the unit interval") {
  RngStream rng(1, 0, StreamRole::path);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("gaussian moments") {
  RngStream rng(3, 0, StreamRole::noise);
  const int m = 200000;
  std::vector<double> draws(m);
  for (auto& d : draws) d = rng.gaussian();
  REQUIRE(std::abs(testutil::mean(draws)) < 3.0 * testutil::stderr_of_mean(draws) + 1e-3);
  REQUIRE(testutil::variance(draws) == Catch::Approx(1.0).margin(0.02));
  REQUIRE(std::abs(testutil::excess_kurtosis(draws)) < 0.05);
}

TEST_CASE("parallel_for output is independent of worker count") {
  auto run = [](int workers) {
    std::vector<double> out(500);
    parallel_for(out.size(), workers, [&](std::size_t i) {
      RngStream rng(99, i, StreamRole::path);
      double s = 0.0;
      for (int k = 0; k < 100; ++k) s += rng.gaussian();
      out[i] = s;
    });
    return out;
  };
  const auto serial = run(1);
  const auto threaded = run(8);
  REQUIRE(serial == threaded);
}

TEST_CASE("parallel_for propagates exceptions") {
  REQUIRE_THROWS_AS(
      parallel_for(16, 4, [](std::size_t i) { if (i == 7) throw std::runtime_error("boom"); }),
      std::runtime_error);
}
