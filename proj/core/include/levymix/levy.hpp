#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "levymix/rng.hpp"

namespace levymix {

enum class ModelKind { SymmetricStable, Brownian };

/// A d-dimensional Levy process with iid components, parametrized so that
/// each component of X_1 has characteristic function exp(-scale*|u|^alpha).
/// Brownian motion is the alpha = 2 member of the family.
struct LevyModel {
  ModelKind kind = ModelKind::SymmetricStable;
  double alpha = 2.0;
  double scale = 1.0;
  int dim = 1;

  static LevyModel stable(double alpha, double scale = 1.0, int dim = 1);
  static LevyModel brownian(double scale = 1.0, int dim = 1);

  void validate() const;
};

/// Observation grid {k/n} over [0, horizon] with an m-step overhang so that
/// every window of m+1 increments starting before the horizon is complete.
struct GridSpec {
  long n = 1;
  double horizon = 1.0;
  int window = 0;
  int dim = 1;

  void validate() const;

  /// floor(n * horizon), the number of summands of the statistic.
  long steps() const;

  /// steps() + window, the number of increments a path must carry.
  long increments_needed() const;
};

/// One sampled path: increments on the grid plus their running sums.
/// increment(k) is X_{(k+1)/n} - X_{k/n}; cumulative(k) is X_{k/n} with
/// cumulative(0) = 0, accumulated in a single left-to-right pass.
class PathSample {
 public:
  PathSample(long n_increments, int dim);

  std::span<const double> increment(long k) const {
    return {increments_.data() + static_cast<std::size_t>(k) * dim_, static_cast<std::size_t>(dim_)};
  }
  std::span<double> increment(long k) {
    return {increments_.data() + static_cast<std::size_t>(k) * dim_, static_cast<std::size_t>(dim_)};
  }
  std::span<const double> cumulative(long k) const {
    return {cumulative_.data() + static_cast<std::size_t>(k) * dim_, static_cast<std::size_t>(dim_)};
  }

  long n_increments() const { return n_increments_; }
  int dim() const { return dim_; }

  /// Rebuilds the running sums from the increments.
  void accumulate();

 private:
  long n_increments_;
  int dim_;
  std::vector<double> increments_;
  std::vector<double> cumulative_;
};

/// One draw of the standard symmetric alpha-stable law, characteristic
/// function exp(-|u|^alpha). Chambers-Mallows-Stuck in the symmetric case;
/// alpha = 1 uses the Cauchy closed form, alpha = 2 returns sqrt(2) * N(0,1).
double sample_stable_standard(double alpha, RngStream& rng);

/// a_n = n^(1/alpha); a_n * X_{1/n} is again scale-standard by self-similarity.
double normalization(const LevyModel& model, long n);

/// One draw of X_t (component law), t > 0.
double sample_marginal(const LevyModel& model, double t, RngStream& rng);

/// Path of grid.increments_needed() increments, each distributed as
/// (scale/n)^(1/alpha) times the standard law, components independent.
PathSample sample_path(const LevyModel& model, const GridSpec& grid, RngStream& rng);

/// Empirical tail report against P[|X_t| >= s] <= kappa * t * s^(-alpha).
struct TailBoundReport {
  std::vector<double> s_grid;
  std::vector<double> tail_prob;    // per s
  std::vector<double> tail_se;      // normal CI half-width / 3, floored at 1/M
  std::vector<double> kappa_at_s;   // p_hat * s^alpha / t
  double kappa_hat = 0.0;           // smallest kappa covering every grid point
  bool violation = false;
  double gamma_hat = 0.0;  // alpha = 2 only: fitted exponent of (t s^-2)^gamma
  bool h3_consistent = false;
  std::vector<std::string> warnings;
};

TailBoundReport check_tail_bound(const LevyModel& model, double t, std::span<const double> s_grid,
                                 long replicates, std::uint64_t master_seed);

/// Monte Carlo table of the small-time truncated moments
/// E[1 ^ ||X_{1/n}||], E[1 ^ ||X_{1/n}||^2], E[||X_{1/n}|| ^ ||X_{1/n}||^2]
/// together with fitted log-log slopes against n.
struct MomentRow {
  long n = 0;
  std::array<double, 3> mean{};
  std::array<double, 3> stderr_{};
};

struct MomentReport {
  std::vector<MomentRow> rows;
  std::array<double, 3> slope{};     // log mean vs log n
  std::array<double, 3> slope_se{};  // regression standard error
};

MomentReport estimate_truncated_moments(const LevyModel& model, std::span<const long> n_list,
                                        long replicates, std::uint64_t master_seed);

}  // namespace levymix
