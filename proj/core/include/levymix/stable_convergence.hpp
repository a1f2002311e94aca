#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "levymix/statistic.hpp"
#include "levymix/variance_profile.hpp"

namespace levymix {

/// Bounded sigma-field probe built from the path: the real or imaginary
/// part of exp(i sum_k <v_k, X_{eps_k}>).
struct ConditioningProbe {
  enum class Part { Real, Imag, One };

  Part part = Part::One;
  std::vector<std::vector<double>> frequencies;  // v_1..v_p
  std::vector<double> times;                     // eps_1 < ... < eps_p

  static ConditioningProbe trivial();
  static ConditioningProbe real(std::vector<std::vector<double>> freqs, std::vector<double> times);
  static ConditioningProbe imag(std::vector<std::vector<double>> freqs, std::vector<double> times);

  double eval(std::span<const std::vector<double>> x_at_times) const;
  std::string label() const;
};

/// Test function h of the Stein-type condition: C^2 with bounded first and
/// second derivatives, coordinate-wise evaluable.
struct ConditionH {
  std::string name;
  std::function<double(std::span<const double>, std::size_t)> grad;  // d/dx_k h
  std::function<double(std::span<const double>, std::size_t)> hess;  // d^2/dx_k^2 h

  /// sum of L^2 log cosh(x_k / L): smoothed quadratic ramp (grad bounded by L).
  static ConditionH smoothed_square(double saturation);
  /// product of (1 + x_k^2)^(-1/2) factors.
  static ConditionH inverse_sqrt_product();
  /// sum of sin(a x_k)/a.
  static ConditionH sine_sum(double a);
  /// exact quadratic x_k^2/2 per coordinate; unbounded, test use only.
  static ConditionH raw_quadratic();

  static std::vector<ConditionH> default_family();
};

/// Bounded continuous f for the stable-limit comparison.
struct BoundedF {
  std::string name;
  std::function<double(std::span<const double>)> eval;

  static BoundedF cosine(std::vector<double> u);
  static BoundedF smoothed_indicator(std::vector<double> level, double width);
  static std::vector<BoundedF> default_family(std::size_t r);
};

struct SteinConditionCell {
  long n = 0;
  std::string probe;
  std::string h;
  double statistic = 0.0;  // sum_k E[F S^k d_k h(S)] - E[F V_k d^2_k h(S)]
  double stderr_ = 0.0;
};

struct SteinConditionReport {
  std::vector<SteinConditionCell> cells;
  bool decaying = false;  // |statistic| shrinks from the first to the last n for every pair
};

/// Empirical check of the Stein-type stable-convergence condition over a
/// finite probe set; S_n are the Z-increments over the time blocks and the
/// V_k are the profile integrals over the same blocks of the same path.
SteinConditionReport check_stein_condition(const LevyModel& model, const CenteredFunctional& f,
                                           const VarianceProfile& profile, const GridSpec& grid,
                                           std::span<const long> n_list, std::span<const double> times,
                                           std::span<const ConditioningProbe> probes,
                                           std::span<const ConditionH> h_family, long replicates,
                                           std::uint64_t master_seed, int workers = 1);

struct StableLimitCell {
  long n = 0;
  std::string probe;
  std::string f;
  double difference = 0.0;  // E[F f(Z_n)] - E[F f(limit)] on coupled paths
  double stderr_ = 0.0;
};

struct StableLimitReport {
  std::vector<StableLimitCell> cells;
  bool decaying = false;
};

/// Empirical check of the defining property of stable convergence: for each
/// bounded f and probe F, E[F f(Z-vector)] is compared against
/// E[F f(sqrt(V_1) N_1, ..., sqrt(V_r) N_r)] with F, V from one path and N
/// from the independent noise stream.
StableLimitReport check_stable_limit(const LevyModel& model, const CenteredFunctional& f,
                                     const VarianceProfile& profile, const GridSpec& grid,
                                     std::span<const long> n_list, std::span<const double> times,
                                     std::span<const ConditioningProbe> probes,
                                     std::span<const BoundedF> f_family, long replicates,
                                     std::uint64_t master_seed, int workers = 1);

}  // namespace levymix
