#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <vector>

#include <levymix/functional.hpp>

#include "testutil.hpp"

using namespace levymix;

namespace {

std::shared_ptr<CosineFunctional> make_g(double theta, std::vector<std::vector<double>> freqs,
                                         double lambda = 0.0, std::vector<double> v = {}) {
  return std::make_shared<CosineFunctional>(WeightFunction::cosine({theta}), std::move(freqs), lambda,
                                            std::move(v));
}

double phi(double u, double alpha) { return std::exp(-std::pow(std::abs(u), alpha)); }

}  // namespace

TEST_CASE("expected_trig_product against hand values") {
  const double alpha = 1.5, scale = 1.0;

  std::vector<TrigFactor> one{{false, 0, {0.8}}};
  REQUIRE(expected_trig_product(one, alpha, scale) == Catch::Approx(phi(0.8, alpha)));

  std::vector<TrigFactor> sin_only{{true, 0, {0.8}}};
  REQUIRE(expected_trig_product(sin_only, alpha, scale) == Catch::Approx(0.0).margin(1e-15));

  // same lag: cos^2 identity
  std::vector<TrigFactor> cos2{{false, 0, {1.0}}, {false, 0, {1.0}}};
  REQUIRE(expected_trig_product(cos2, alpha, scale) ==
          Catch::Approx(0.5 * (1.0 + phi(2.0, alpha))));

  // distinct lags factorize
  std::vector<TrigFactor> split{{false, 0, {1.0}}, {false, 1, {0.5}}};
  REQUIRE(expected_trig_product(split, alpha, scale) ==
          Catch::Approx(phi(1.0, alpha) * phi(0.5, alpha)));

  // sin a sin b = (cos(a-b) - cos(a+b))/2 on a shared variable
  std::vector<TrigFactor> sins{{true, 0, {1.0}}, {true, 0, {0.6}}};
  REQUIRE(expected_trig_product(sins, alpha, scale) ==
          Catch::Approx(0.5 * (phi(0.4, alpha) - phi(1.6, alpha))));

  // odd sine count vanishes
  std::vector<TrigFactor> odd{{true, 0, {1.0}}, {false, 0, {0.6}}};
  REQUIRE(expected_trig_product(odd, alpha, scale) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("eval matches a hand expansion at one point") {
  const auto g = make_g(0.7, {{1.0}, {0.8}}, 0.5, {1.2});
  const std::vector<double> x{0.3};
  const std::vector<double> y{0.4, -0.9};
  const double by_hand =
      std::cos(0.7 * 0.3) * (std::cos(1.0 * 0.4) * std::cos(0.8 * -0.9) + 0.5 * std::sin(1.2 * 0.4));
  REQUIRE(g->eval(x, y) == Catch::Approx(by_hand).epsilon(1e-15));
  REQUIRE_FALSE(g->symmetric_in_y());
  REQUIRE(make_g(0.7, {{1.0}})->symmetric_in_y());
}

TEST_CASE("symmetry flag holds on random probes") {
  const auto g = make_g(0.4, {{1.0}, {0.8}});
  RngStream rng(17, 0, StreamRole::inner);
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> x{2.0 * rng.uniform01() - 1.0};
    std::vector<double> y{4.0 * rng.uniform01() - 2.0, 4.0 * rng.uniform01() - 2.0};
    const double a = g->eval(x, y);
    for (auto& v : y) v = -v;
    REQUIRE(g->eval(x, y) == a);
  }
}

TEST_CASE("bound certificates hold on random probes") {
  const auto g = make_g(0.7, {{1.0}, {0.8}}, 0.5, {1.2});
  RngStream rng(18, 0, StreamRole::inner);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const std::vector<double> x{8.0 * rng.uniform01() - 4.0};
    const std::vector<double> y{20.0 * rng.uniform01() - 10.0, 20.0 * rng.uniform01() - 10.0};
    worst = std::max(worst, std::abs(g->eval(x, y)));
  }
  REQUIRE(worst <= g->bounds().g);
}

TEST_CASE("conditional mean: closed form and MC agree") {
  const LevyModel model = LevyModel::stable(1.5);
  // m=0, |u|=1: mu(x) = w(x) e^{-1} for every alpha
  for (double alpha : {0.8, 1.5, 2.0}) {
    const auto g = make_g(0.7, {{1.0}});
    const double factor = conditional_mean_exact(*g, LevyModel::stable(alpha));
    REQUIRE(factor == Catch::Approx(std::exp(-1.0)));
  }

  const auto g = make_g(0.7, {{1.0}, {0.8}}, 0.5, {1.2});
  const double exact = conditional_mean_exact(*g, model);
  RngStream rng(23, 0, StreamRole::inner);
  const std::vector<double> x{0.3};
  const auto mc = conditional_mean_mc(*g, model, 16, x, 100000, rng);
  const double w = std::cos(0.7 * 0.3);
  REQUIRE(mc.value == Catch::Approx(exact * w).margin(3.0 * mc.stderr_));
}

TEST_CASE("MC centering is gated by the bias floor") {
  const auto g = make_g(0.7, {{1.0}});
  const LevyModel model = LevyModel::stable(1.5);
  RngStream rng(29, 0, StreamRole::inner);
  const std::vector<double> x{0.0};
  REQUIRE_THROWS_AS(conditional_mean_mc(*g, model, 256, x, 1000, rng, /*floor=*/65536),
                    std::invalid_argument);
}

TEST_CASE("centered eval kills constants and centers empirically") {
  const LevyModel model = LevyModel::stable(1.5);
  // u = 0 makes the cosine product constant 1
  const auto constant_g = make_g(0.0, {{0.0}});
  const CenteredFunctional fc = CenteredFunctional::exact(constant_g, model);
  const std::vector<double> x{0.4};
  const std::vector<double> y{1.7};
  REQUIRE(fc.eval(x, y) == 0.0);

  const auto g = make_g(0.7, {{1.0}, {0.8}}, 0.5, {1.2});
  const CenteredFunctional f = CenteredFunctional::exact(g, model);
  RngStream rng(31, 0, StreamRole::inner);
  const int m = 100000;
  std::vector<double> vals(m);
  std::vector<double> yy(2);
  for (int i = 0; i < m; ++i) {
    for (auto& v : yy) v = sample_stable_standard(model.alpha, rng);
    vals[i] = f.eval(x, yy);
  }
  REQUIRE(std::abs(testutil::mean(vals)) < 3.0 * testutil::stderr_of_mean(vals));
}

TEST_CASE("closed_form_gn: m = 0 formula") {
  for (double alpha : {1.5, 2.0}) {
    const LevyModel model = LevyModel::stable(alpha);
    const double u = 0.9;
    const auto g = make_g(0.7, {{u}});
    const std::vector<double> x{0.5};
    const double w = std::cos(0.7 * 0.5);
    const double expected =
        w * w * (0.5 * (1.0 + phi(2.0 * u, alpha)) - phi(u, alpha) * phi(u, alpha));
    REQUIRE(closed_form_gn(*g, model, 64, x) == Catch::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("closed_form_gn: constant functional has zero variance") {
  const auto g = make_g(0.0, {{0.0}});
  const std::vector<double> x{0.3};
  REQUIRE(closed_form_gn(*g, LevyModel::stable(1.5), 32, x) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("closed_form_gn is constant over n, bit for bit") {
  const auto g = make_g(0.7, {{1.0}, {0.8}}, 0.3, {1.1});
  const LevyModel model = LevyModel::stable(1.3);
  const std::vector<double> x{-0.7};
  const double v1 = closed_form_gn(*g, model, 4, x);
  const double v2 = closed_form_gn(*g, model, 4096, x);
  REQUIRE(v1 == v2);
}

TEST_CASE("closed_form_gn is nonnegative at the probe grid") {
  for (int m = 0; m <= 2; ++m) {
    std::vector<std::vector<double>> freqs;
    for (int j = 0; j <= m; ++j) freqs.push_back({1.0 - 0.2 * j});
    const auto g = make_g(0.9, freqs);
    for (const auto& x : default_probe_grid(1))
      REQUIRE(closed_form_gn(*g, LevyModel::stable(1.5), 8, x) >= -1e-12);
  }
}

TEST_CASE("closed_form_gn against brute-force MC, m = 1") {
  const LevyModel model = LevyModel::stable(1.5);
  const auto g = make_g(0.7, {{1.0}, {0.8}});
  const std::vector<double> x{0.4};
  const double exact = closed_form_gn(*g, model, 16, x);

  // independent oracle: direct simulation of the lag-sum of covariances
  RngStream rng(37, 0, StreamRole::inner);
  const int reps = 200000;
  const int m = 1;
  std::vector<double> y(2);
  std::vector<double> draws(3 * m + 1);
  std::vector<double> a(reps);
  std::vector<std::vector<double>> b(3, std::vector<double>(reps));
  for (int r = 0; r < reps; ++r) {
    for (auto& v : draws) v = sample_stable_standard(model.alpha, rng);
    auto window_eval = [&](int k) {
      y[0] = draws[static_cast<std::size_t>(k)];
      y[1] = draws[static_cast<std::size_t>(k + 1)];
      return g->eval(x, y);
    };
    a[r] = window_eval(m);
    for (int j = -m; j <= m; ++j) b[static_cast<std::size_t>(j + m)][r] = window_eval(m + j);
  }
  const double abar = testutil::mean(a);
  std::vector<double> bbar(3);
  for (int j = 0; j < 3; ++j) bbar[static_cast<std::size_t>(j)] = testutil::mean(b[static_cast<std::size_t>(j)]);
  double est = 0.0;
  std::vector<double> omega(reps);
  for (int r = 0; r < reps; ++r) {
    double o = 0.0;
    for (int j = 0; j < 3; ++j)
      o += (a[r] - abar) * (b[static_cast<std::size_t>(j)][r] - bbar[static_cast<std::size_t>(j)]);
    omega[r] = o;
    est += o;
  }
  est /= (reps - 1);
  const double se = testutil::stderr_of_mean(omega);
  REQUIRE(est == Catch::Approx(exact).margin(3.0 * se));
}

TEST_CASE("H2 closed-form moment and Monte Carlo check") {
  const LevyModel model = LevyModel::stable(1.5);

  SECTION("symmetric functionals are consistent with the hypothesis") {
    const auto g = make_g(0.7, {{1.0}, {0.8}});
    const auto rep = check_H2(*g, model, 4, 20000, 41);
    REQUIRE(rep.consistent);
    for (const auto& x : default_probe_grid(1))
      REQUIRE(h2_moment_exact(*g, model, 4, x, 0) == 0.0);
  }

  SECTION("asymmetric functionals are flagged") {
    const auto g = make_g(0.7, {{1.0}}, 0.5, {1.2});
    const auto rep = check_H2(*g, model, 4, 200000, 43);
    REQUIRE_FALSE(rep.consistent);

    // the cell at x = 0 matches the closed-form oracle
    const std::vector<double> x0{0.0};
    const double oracle = h2_moment_exact(*g, model, 4, x0, 0);
    bool found = false;
    for (const auto& cell : rep.cells) {
      if (cell.x == x0 && cell.component == 0) {
        REQUIRE(cell.estimate == Catch::Approx(oracle).margin(4.0 * cell.stderr_));
        found = true;
      }
    }
    REQUIRE(found);
  }

  SECTION("alpha <= 1 refuses") {
    const auto g = make_g(0.7, {{1.0}});
    REQUIRE_THROWS_AS(check_H2(*g, LevyModel::stable(0.9), 4, 1000, 44), std::invalid_argument);
  }
}
