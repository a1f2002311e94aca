#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "levymix/levy.hpp"
#include "levymix/rng.hpp"

namespace levymix {

/// Certified sup-norms of the window functional and its x-derivatives.
struct FunctionalBounds {
  double g = 0.0;    // ||g||_inf
  double dx = 0.0;   // max_i ||dg/dx_i||_inf
  double dxx = 0.0;  // max_ij ||d2g/dx_i dx_j||_inf
};

/// g(x, y_0..y_m) acting on the current state x in R^d and a window of m+1
/// rescaled increments, flattened window-major into y (y[j*d + c]).
class SmoothFunctional {
 public:
  virtual ~SmoothFunctional() = default;

  virtual double eval(std::span<const double> x, std::span<const double> y) const = 0;

  int window() const { return window_; }
  int dim() const { return dim_; }
  bool symmetric_in_y() const { return symmetric_in_y_; }
  const FunctionalBounds& bounds() const { return bounds_; }

 protected:
  SmoothFunctional(int window, int dim, bool symmetric, FunctionalBounds bounds)
      : window_(window), dim_(dim), symmetric_in_y_(symmetric), bounds_(bounds) {}

  int window_;
  int dim_;
  bool symmetric_in_y_;
  FunctionalBounds bounds_;
};

/// Bounded smooth weight w(x); the two built-in shapes are
/// amplitude * cos(<theta, x>) and amplitude / (1 + ||x||^2).
struct WeightFunction {
  enum class Kind { Cosine, InverseQuadratic };

  Kind kind = Kind::Cosine;
  double amplitude = 1.0;
  std::vector<double> theta;  // Cosine only; theta = 0 gives the constant weight

  static WeightFunction constant(double value, int dim);
  static WeightFunction cosine(std::vector<double> theta, double amplitude = 1.0);
  static WeightFunction inverse_quadratic(int dim, double amplitude = 1.0);

  double eval(std::span<const double> x) const;
  // analytic sup-norms of w and its first/second partials
  double sup() const;
  double sup_dx() const;
  double sup_dxx() const;
};

/// The analytic oracle family
///   g(x, y_0..y_m) = w(x) * (prod_j cos(<u_j, y_j>) + lambda * sin(<v, y_0>)).
/// Every conditional moment needed by the toolkit has a closed form when the
/// driving process is symmetric stable.
class CosineFunctional : public SmoothFunctional {
 public:
  CosineFunctional(WeightFunction weight, std::vector<std::vector<double>> frequencies,
                   double lambda = 0.0, std::vector<double> asym_frequency = {});

  double eval(std::span<const double> x, std::span<const double> y) const override;

  const WeightFunction& weight() const { return weight_; }
  const std::vector<std::vector<double>>& frequencies() const { return frequencies_; }
  double lambda() const { return lambda_; }
  const std::vector<double>& asym_frequency() const { return asym_frequency_; }

 private:
  WeightFunction weight_;
  std::vector<std::vector<double>> frequencies_;  // u_0..u_m, each of size d
  double lambda_;
  std::vector<double> asym_frequency_;  // v, size d
};

/// mu_n(x) = E g(x, a_n X~_{1/n}^(0), ..., a_n X~_{1/n}^(m)) over independent
/// copies. Exact for the cosine family under a stable model.
double conditional_mean_exact(const CosineFunctional& g, const LevyModel& model);

struct McEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// Monte Carlo fallback for general g. The centering error of a rate
/// experiment grows like sqrt(n)*t*eps, so callers performing rate runs must
/// request n_inner >= (n/tol)^2; below the floor this throws.
McEstimate conditional_mean_mc(const SmoothFunctional& g, const LevyModel& model, long n,
                               std::span<const double> x, long n_inner, RngStream& rng,
                               long n_inner_floor = 0);

/// Conditional centering g - mu_n bound to one (g, model) pair.
class CenteredFunctional {
 public:
  /// Exact centering; requires the cosine family on a stable/Brownian model.
  static CenteredFunctional exact(std::shared_ptr<const CosineFunctional> g, const LevyModel& model);

  double eval(std::span<const double> x, std::span<const double> y) const;
  double mean(std::span<const double> x) const;

  const SmoothFunctional& functional() const { return *g_; }
  const LevyModel& model() const { return model_; }
  bool is_exact() const { return true; }

 private:
  CenteredFunctional(std::shared_ptr<const CosineFunctional> g, const LevyModel& model, double mean_factor);

  std::shared_ptr<const CosineFunctional> g_;
  LevyModel model_;
  double mean_factor_;  // mu_n(x) = mean_factor * w(x), n-free for stable models
};

/// Exact finite-n variance profile value gfrak_n(x); constant over n for
/// stable models, where a_n X_{1/n} is standard by self-similarity.
double closed_form_gn(const CosineFunctional& g, const LevyModel& model, long n,
                      std::span<const double> x);

/// The x-free lag-sum factor of the profile: gfrak(x) = factor * w(x)^2.
double closed_form_gn_factor(const CosineFunctional& g, const LevyModel& model);

/// Closed-form value of E[(g(x, I) - mu(x)) * J^(l)] with J the unscaled
/// window displacement; the expectation the H2 hypothesis requires to vanish.
double h2_moment_exact(const CosineFunctional& g, const LevyModel& model, long n,
                       std::span<const double> x, int component);

/// Fixed probe grid in [-2,2]^d used by the H2 and beta_n checks (9 points
/// for d = 1, the 3x3 tensor grid for d = 2).
std::vector<std::vector<double>> default_probe_grid(int dim);

struct H2Cell {
  std::vector<double> x;
  int component = 0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  bool covers_zero = false;
};

struct H2Report {
  std::vector<H2Cell> cells;
  bool consistent = false;  // every CI covers zero
};

/// Monte Carlo check of the compatibility hypothesis between g and the law
/// of the increments; requires alpha > 1 so the window displacement is
/// integrable.
H2Report check_H2(const SmoothFunctional& g, const LevyModel& model, long n, long replicates,
                  std::uint64_t master_seed);

/// E[prod_i trig_i(<coeff_i, Y_{lag_i}>)] for iid symmetric stable vectors Y
/// with per-component characteristic function exp(-scale*|u|^alpha). Expands
/// the product into complex exponentials over 2^K sign choices.
struct TrigFactor {
  bool is_sin = false;
  int lag = 0;
  std::vector<double> coeff;
};

double expected_trig_product(std::span<const TrigFactor> factors, double alpha, double scale);

}  // namespace levymix
