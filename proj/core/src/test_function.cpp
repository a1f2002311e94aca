#include "levymix/test_function.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace levymix {

TestFunction TestFunction::sinusoid(double c, double a, double b) {
  std::array<double, 6> cert{};
  for (int l = 0; l <= 5; ++l) cert[static_cast<std::size_t>(l)] = std::abs(c) * std::pow(a, l);
  auto eval = [c, a, b](int order, double x) {
    return c * std::pow(a, order) * std::sin(a * x + b + order * std::numbers::pi / 2.0);
  };
  return TestFunction("sin(a=" + std::to_string(a) + ",b=" + std::to_string(b) + ")", eval, cert);
}

TestFunction TestFunction::gauss_bump(double amplitude, double mu, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("gauss_bump: s must be positive");
  // d^l/dx^l e^{-u^2/2} = (-1)^l He_l(u) e^{-u^2/2} with u = (x-mu)/s
  auto eval = [amplitude, mu, s](int order, double x) {
    const double u = (x - mu) / s;
    const double base = amplitude * std::exp(-0.5 * u * u);
    double he = 1.0;
    switch (order) {
      case 0: he = 1.0; break;
      case 1: he = u; break;
      case 2: he = u * u - 1.0; break;
      case 3: he = u * (u * u - 3.0); break;
      case 4: he = (u * u) * (u * u) - 6.0 * u * u + 3.0; break;
      case 5: he = u * ((u * u) * (u * u) - 10.0 * u * u + 15.0); break;
      default: throw std::invalid_argument("gauss_bump: order must be 0..5");
    }
    const double sign = (order % 2 == 0) ? 1.0 : -1.0;
    return sign * he * base / std::pow(s, order);
  };
  // certified norms are filled by the metric certifier; initialize with a
  // conservative analytic envelope max|He_l(u)|e^{-u^2/2} <= l! (crude)
  std::array<double, 6> cert{};
  double fact = 1.0;
  for (int l = 0; l <= 5; ++l) {
    if (l > 0) fact *= l;
    cert[static_cast<std::size_t>(l)] = std::abs(amplitude) * 3.0 * fact / std::pow(s, l);
  }
  return TestFunction("bump(mu=" + std::to_string(mu) + ",s=" + std::to_string(s) + ")", eval, cert);
}

TestFunction TestFunction::square() {
  const double inf = std::numeric_limits<double>::infinity();
  auto eval = [](int order, double x) {
    switch (order) {
      case 0: return x * x;
      case 1: return 2.0 * x;
      case 2: return 2.0;
      default: return 0.0;
    }
  };
  return TestFunction("x^2", eval, {inf, inf, 2.0, 0.0, 0.0, 0.0});
}

TestFunction TestFunction::cube() {
  const double inf = std::numeric_limits<double>::infinity();
  auto eval = [](int order, double x) {
    switch (order) {
      case 0: return x * x * x;
      case 1: return 3.0 * x * x;
      case 2: return 6.0 * x;
      case 3: return 6.0;
      default: return 0.0;
    }
  };
  return TestFunction("x^3", eval, {inf, inf, inf, 6.0, 0.0, 0.0});
}

}  // namespace levymix
