#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "levymix/quadrature.hpp"
#include "levymix/test_function.hpp"

namespace levymix {

struct SteinQuadratureSpec {
  std::size_t semigroup_nodes = 64;  // Gauss-Legendre on the u = e^{-theta} axis
  std::size_t gaussian_nodes = 40;   // Gauss-Hermite for the inner expectation
};

/// Numerical solution of x h'(x) - gamma h''(x) = psi(x) - E[psi(sqrt(gamma) N)].
///
/// h' is represented through the Ornstein-Uhlenbeck semigroup integral mapped
/// to u in [0,1]; h'' differentiates under the integral. The overall sign of
/// the representation is resolved against the residual at x in {-1, 0, 1} and
/// recorded in `sign`.
class SteinSolution {
 public:
  double h_prime(double x) const;
  double h_double_prime(double x) const;

  /// x h'(x) - gamma h''(x) - (psi(x) - E[psi(sqrt(gamma) N)])
  double residual(double x) const;

  double gamma() const { return gamma_; }
  double sign() const { return sign_; }
  double psi_mean() const { return psi_mean_; }
  const SteinQuadratureSpec& spec() const { return spec_; }

  /// Max |h'| change at the probes when both node counts double.
  double stability_certificate(std::span<const double> probes) const;

 private:
  friend SteinSolution solve_stein(const TestFunction& psi, double gamma, SteinQuadratureSpec spec,
                                   double tolerance, int max_refinements);

  SteinSolution(const TestFunction& psi, double gamma, SteinQuadratureSpec spec);

  double raw_h_prime(double x) const;    // -int_0^1 E[psi'(ux + sqrt(1-u^2) sqrt(gamma) N)] du
  double raw_h_dprime(double x) const;   // its x-derivative

  const TestFunction* psi_;
  double gamma_;
  double sign_ = 1.0;
  double psi_mean_ = 0.0;
  SteinQuadratureSpec spec_;
  QuadratureRule semigroup_;
  QuadratureRule gauss_;
};

class SteinSolveError : public std::runtime_error {
 public:
  SteinSolveError(const std::string& what, std::vector<double> probe_grid, std::vector<double> residuals)
      : std::runtime_error(what), probe_grid(std::move(probe_grid)), residuals(std::move(residuals)) {}
  std::vector<double> probe_grid;
  std::vector<double> residuals;
};

/// Solves the Stein equation; node counts double up to max_refinements until
/// the residual meets the tolerance on the probe grid |x| <= 5.
SteinSolution solve_stein(const TestFunction& psi, double gamma,
                          SteinQuadratureSpec spec = SteinQuadratureSpec{}, double tolerance = 1e-6,
                          int max_refinements = 3);

/// The semigroup sensitivity functional
///   V[psi](x) = -int_0^inf e^-t (1 - e^-2t) E[psi'''(e^-t x + sqrt(1-e^-2t) N)] dt
/// evaluated with the same quadrature scheme.
double compute_Vpsi(const TestFunction& psi, double x, SteinQuadratureSpec spec = SteinQuadratureSpec{});

struct TaylorRow {
  double gamma_tilde = 0.0;
  double max_error = 0.0;  // max_x |h'_g - h'_gt - coeff (g - gt) V[psi]|
};

struct TaylorReport {
  std::vector<TaylorRow> rows;
  double slope = 0.0;     // log max_error vs log |gamma - gamma_tilde|
  double slope_se = 0.0;
  double coefficient;     // the first-order coefficient applied to V[psi]
};

/// First-order expansion check of h'_gamma in gamma. For the residual-sign
/// solution the sensitivity at gamma = 1 is -V[psi]/2, so the applied
/// coefficient is -(gamma - gamma_tilde)/2; the report carries it.
TaylorReport check_hprime_taylor(const TestFunction& psi, double gamma,
                                 std::span<const double> gamma_tilde_list,
                                 std::span<const double> x_grid,
                                 SteinQuadratureSpec spec = SteinQuadratureSpec{});

struct GaussianDistanceCell {
  double sigma = 0.0;
  double s = 0.0;
  double left = 0.0;   // |E[psi(X) - psi(Y) - (sigma^2 - s^2)/2 psi''(Y)]|
  double bound = 0.0;  // 4 ||psi''''|| (sigma^2 - s^2)^2
  bool pass = false;
};

struct GaussianDistanceReport {
  std::vector<GaussianDistanceCell> cells;
  bool all_pass = false;
};

/// Second-order Gaussian comparison: X ~ N(0, sigma^2) against Y ~ N(0, s^2)
/// with the half-weighted psi'' correction; all three expectations are
/// one-dimensional Gaussian quadratures.
GaussianDistanceReport check_gaussian_distance_lemma(const TestFunction& psi,
                                                     std::span<const double> sigma_grid,
                                                     std::span<const double> s_grid,
                                                     std::size_t gaussian_nodes = 80);

}  // namespace levymix
