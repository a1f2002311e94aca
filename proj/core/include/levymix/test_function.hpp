#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>

namespace levymix {

/// A scalar test function with pointwise derivatives up to order 5 and
/// certified sup-norms per order. Members of the smooth-metric class need
/// every certified norm <= 1.
class TestFunction {
 public:
  using Evaluator = std::function<double(int order, double x)>;

  TestFunction(std::string name, Evaluator eval, std::array<double, 6> certified)
      : name_(std::move(name)), eval_(std::move(eval)), certified_(certified) {}

  double operator()(double x) const { return eval_(0, x); }
  double deriv(int order, double x) const { return eval_(order, x); }

  const std::array<double, 6>& certified() const { return certified_; }
  const std::string& name() const { return name_; }

  /// c * sin(a x + b); derivative of order l has sup |c| * a^l.
  static TestFunction sinusoid(double c, double a, double b);

  /// amplitude * exp(-(x-mu)^2 / (2 s^2)).
  static TestFunction gauss_bump(double amplitude, double mu, double s);

  /// x^2; outside the metric class, used to exercise the Stein solver.
  static TestFunction square();

  /// x^3; outside the metric class, closed-form Stein solution for tests.
  static TestFunction cube();

 private:
  std::string name_;
  Evaluator eval_;
  std::array<double, 6> certified_;
};

}  // namespace levymix
