#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include <levymix/levy.hpp>

#include "testutil.hpp"

using namespace levymix;

namespace {

// empirical characteristic function against the law's exp(-|u|^alpha)
double cf_error(double alpha, double u, int m, std::uint64_t seed) {
  RngStream rng(seed, 0, StreamRole::path);
  double s = 0.0;
  for (int i = 0; i < m; ++i) s += std::cos(u * sample_stable_standard(alpha, rng));
  return std::abs(s / m - std::exp(-std::pow(std::abs(u), alpha)));
}

}  // namespace

TEST_CASE("sampler rejects alpha outside (0,2]") {
  RngStream rng(1, 0, StreamRole::path);
  REQUIRE_THROWS_AS(sample_stable_standard(0.0, rng), std::invalid_argument);
  REQUIRE_THROWS_AS(sample_stable_standard(2.5, rng), std::invalid_argument);
  REQUIRE_THROWS_AS(sample_stable_standard(-1.0, rng), std::invalid_argument);
}

TEST_CASE("alpha = 2 draws have variance 2") {
  // exp(-u^2) is the N(0,2) characteristic function
  RngStream rng(11, 0, StreamRole::path);
  const int m = 1000000;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < m; ++i) {
    const double x = sample_stable_standard(2.0, rng);
    s += x;
    ss += x * x;
  }
  const double var = ss / m - (s / m) * (s / m);
  // SE of the sample variance of a Gaussian: var * sqrt(2/m)
  REQUIRE(std::abs(var - 2.0) < 3.0 * 2.0 * std::sqrt(2.0 / m));
}

TEST_CASE("alpha = 1 is standard Cauchy") {
  RngStream rng(12, 0, StreamRole::path);
  const int m = 1000000;
  int inside = 0;
  for (int i = 0; i < m; ++i)
    if (std::abs(sample_stable_standard(1.0, rng)) <= 1.0) ++inside;
  // P[|X| <= 1] = (2/pi) arctan(1) = 1/2
  const double p = static_cast<double>(inside) / m;
  REQUIRE(std::abs(p - 0.5) < 3.0 * std::sqrt(0.25 / m));
}

TEST_CASE("characteristic function matches the law across alpha") {
  const int m = 200000;
  const double tol = 4.0 / std::sqrt(static_cast<double>(m));
  for (double alpha : {0.7, 1.0, 1.3, 1.8, 2.0})
    for (double u : {0.5, 1.0, 2.0}) REQUIRE(cf_error(alpha, u, m, 21) < tol);
}

TEST_CASE("normalization is n^(1/alpha)") {
  REQUIRE(normalization(LevyModel::stable(2.0), 100) == Catch::Approx(10.0));
  REQUIRE(normalization(LevyModel::stable(0.5), 16) == Catch::Approx(256.0));
  REQUIRE_THROWS_AS(normalization(LevyModel::stable(1.0), 0), std::invalid_argument);
}

TEST_CASE("self-similarity: a_n X_{1/n} has the standard law") {
  // rescaled one-step marginals at n = 64 carry the alpha = 1.5 cf
  const LevyModel model = LevyModel::stable(1.5);
  GridSpec grid;
  grid.n = 64;
  grid.horizon = 1.0 / 64.0;
  const double a_n = normalization(model, 64);
  const int m = 200000;
  for (double u : {0.5, 1.0, 2.0}) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      RngStream rng(31, i, StreamRole::path);
      const PathSample path = sample_path(model, grid, rng);
      s += std::cos(u * a_n * path.increment(0)[0]);
    }
    REQUIRE(std::abs(s / m - std::exp(-std::pow(u, 1.5))) < 4.0 / std::sqrt(static_cast<double>(m)));
  }
}

TEST_CASE("self-similarity: rescaled laws agree across n (KS)") {
  const LevyModel model = LevyModel::stable(1.5);
  const int m = 100000;
  auto draw = [&](long n, std::uint64_t seed) {
    std::vector<double> out(m);
    const double a_n = normalization(model, n);
    const double step_scale = std::pow(model.scale / static_cast<double>(n), 1.0 / model.alpha);
    for (int i = 0; i < m; ++i) {
      RngStream rng(seed, i, StreamRole::path);
      out[i] = a_n * step_scale * sample_stable_standard(model.alpha, rng);
    }
    return out;
  };
  const double ks = testutil::ks_statistic(draw(16, 71), draw(256, 72));
  // 1% critical value of the two-sample statistic
  const double crit = 1.628 * std::sqrt(2.0 / m);
  REQUIRE(ks < crit);
}

TEST_CASE("sample_path is deterministic and component-independent") {
  const LevyModel model = LevyModel::stable(1.2, 1.0, 2);
  GridSpec grid;
  grid.n = 8;
  grid.horizon = 1.0;
  grid.window = 1;
  grid.dim = 2;

  RngStream r1(5, 3, StreamRole::path);
  RngStream r2(5, 3, StreamRole::path);
  const PathSample p1 = sample_path(model, grid, r1);
  const PathSample p2 = sample_path(model, grid, r2);
  REQUIRE(p1.n_increments() == grid.increments_needed());
  for (long k = 0; k < p1.n_increments(); ++k)
    for (int c = 0; c < 2; ++c) REQUIRE(p1.increment(k)[c] == p2.increment(k)[c]);

  // cumulative sums are the exact prefix sums
  double run0 = 0.0;
  for (long k = 0; k < p1.n_increments(); ++k) {
    run0 += p1.increment(k)[0];
    REQUIRE(p1.cumulative(k + 1)[0] == run0);
  }

  // components decorrelated (bounded transform keeps moments finite)
  const int paths = 100000;
  std::vector<double> prod(paths);
  for (int i = 0; i < paths; ++i) {
    RngStream rng(6, i, StreamRole::path);
    GridSpec one;
    one.n = 1;
    one.horizon = 1.0;
    one.dim = 2;
    const PathSample p = sample_path(model, one, rng);
    prod[i] = std::tanh(p.increment(0)[0]) * std::tanh(p.increment(0)[1]);
  }
  REQUIRE(std::abs(testutil::mean(prod)) < 3.0 * testutil::stderr_of_mean(prod));
}

TEST_CASE("single-step grid gives the unit-time law") {
  const LevyModel model = LevyModel::stable(1.5);
  GridSpec grid;
  grid.n = 1;
  grid.horizon = 1.0;
  const int m = 200000;
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    RngStream rng(41, i, StreamRole::path);
    const PathSample p = sample_path(model, grid, rng);
    REQUIRE(p.n_increments() == 1);
    s += std::cos(p.increment(0)[0]);
  }
  REQUIRE(std::abs(s / m - std::exp(-1.0)) < 4.0 / std::sqrt(static_cast<double>(m)));
}

TEST_CASE("tail bound report: Cauchy oracle") {
  const LevyModel model = LevyModel::stable(1.0);
  const std::vector<double> s_grid{2.0, 5.0, 10.0, 20.0};
  const auto rep = check_tail_bound(model, 1.0, s_grid, 200000, 51);
  // P[|X_1| >= 10] = 1 - (2/pi) arctan(10)
  const double oracle = 1.0 - 2.0 / std::numbers::pi * std::atan(10.0);
  REQUIRE(rep.tail_prob[2] == Catch::Approx(oracle).margin(3.0 * rep.tail_se[2]));
  REQUIRE_FALSE(rep.violation);
  REQUIRE(rep.kappa_hat > 0.0);
  // monotone tails
  for (std::size_t j = 1; j < rep.tail_prob.size(); ++j)
    REQUIRE(rep.tail_prob[j] <= rep.tail_prob[j - 1]);
}

TEST_CASE("tail bound: fitted kappa stable in t") {
  const LevyModel model = LevyModel::stable(1.5);
  const std::vector<double> s1{3.0, 5.0, 8.0};
  const std::vector<double> s01{3.0 * std::pow(0.1, 1.0 / 1.5), 5.0 * std::pow(0.1, 1.0 / 1.5),
                                8.0 * std::pow(0.1, 1.0 / 1.5)};
  const auto r1 = check_tail_bound(model, 1.0, s1, 400000, 52);
  const auto r01 = check_tail_bound(model, 0.1, s01, 400000, 53);
  REQUIRE(std::abs(r1.kappa_hat - r01.kappa_hat) < 0.2 * std::max(r1.kappa_hat, r01.kappa_hat));
}

TEST_CASE("Brownian tails pass the H3 form") {
  const LevyModel model = LevyModel::brownian();
  const std::vector<double> s_grid{2.0, 3.0, 4.0, 5.0};
  const auto rep = check_tail_bound(model, 1.0, s_grid, 400000, 54);
  REQUIRE(rep.gamma_hat > 1.0);
  REQUIRE(rep.h3_consistent);
}

TEST_CASE("truncated moment slopes match the small-time bounds") {
  std::vector<long> ns;
  for (long n = 16; n <= 4096; n *= 2) ns.push_back(n);

  const auto rep15 = estimate_truncated_moments(LevyModel::stable(1.5), ns, 100000, 61);
  REQUIRE(rep15.slope[0] == Catch::Approx(-1.0 / 1.5).margin(0.1));

  const auto rep05 = estimate_truncated_moments(LevyModel::stable(0.5), ns, 100000, 62);
  REQUIRE(rep05.slope[0] == Catch::Approx(-1.0).margin(0.1));
}

TEST_CASE("truncated moments vanish with the scale") {
  std::vector<long> ns{64};
  const auto rep = estimate_truncated_moments(LevyModel::stable(1.5, 1e-12), ns, 2000, 63);
  for (int j = 0; j < 3; ++j) REQUIRE(rep.rows[0].mean[j] < 1e-6);
}

TEST_CASE("grid validation") {
  GridSpec g;
  g.n = 4;
  g.horizon = 0.1;
  REQUIRE_THROWS_AS(g.validate(), std::invalid_argument);  // floor(0.4) = 0 steps
  g.horizon = 1.0;
  g.window = -1;
  REQUIRE_THROWS_AS(g.validate(), std::invalid_argument);
  g.window = 2;
  g.validate();
  REQUIRE(g.steps() == 4);
  REQUIRE(g.increments_needed() == 6);
}
