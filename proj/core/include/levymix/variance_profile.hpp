#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "levymix/functional.hpp"
#include "levymix/levy.hpp"

namespace levymix {

/// The variance profile gfrak_n, its limit gfrak, and whether both are exact.
/// For symmetric stable models with the cosine family the profile is closed
/// form and constant over n, so beta_n vanishes identically.
struct VarianceProfile {
  std::function<double(std::span<const double>)> gfrak;
  std::function<double(long, std::span<const double>)> gfrak_n;
  bool exact = false;

  static VarianceProfile closed_form(std::shared_ptr<const CosineFunctional> g, const LevyModel& model);
  static VarianceProfile constant(double value);
};

/// One draw of the mixed-Gaussian limit sqrt(V) * N.
struct LimitSample {
  double value = 0.0;
  double v = 0.0;  // realized conditional variance, >= 0
  long replicate_index = 0;
};

/// Unbiased Monte Carlo estimate of gfrak_n(x): each replicate draws 3m+1
/// independent scaled windows and accumulates the lag covariances in
/// sample-covariance form.
McEstimate estimate_gn_mc(const SmoothFunctional& g, const LevyModel& model, long n,
                          std::span<const double> x, long replicates, RngStream& rng);

/// Left-endpoint Riemann sums (1/n) * sum_i gfrak(X_{(i-1)/n}) of the
/// profile along a path, reported at each requested time; a single
/// left-to-right pass, so consecutive values share bit-exact partial sums.
std::vector<double> compute_V_prefix(const PathSample& path, const VarianceProfile& profile,
                                     long n, std::span<const double> times);

double compute_V(const PathSample& path, const VarianceProfile& profile, long n, double t);

/// V over the block (t0, t1], as the difference of the prefix sums.
double compute_V_block(const PathSample& path, const VarianceProfile& profile, long n, double t0,
                       double t1);

/// Batch of mixed-Gaussian limit draws: fresh path -> V -> sqrt(V) * N with
/// N from the dedicated noise stream.
std::vector<LimitSample> sample_limit(const LevyModel& model, const VarianceProfile& profile,
                                      const GridSpec& grid, long replicates,
                                      std::uint64_t master_seed, int workers = 1);

struct BetaRow {
  long n = 0;
  double beta = 0.0;
  double max_se = 0.0;  // 0 in exact mode
};

/// Sup over the probe grid of |gfrak_n - gfrak| per n. Exact mode returns 0
/// rows for stable models; Monte Carlo mode reports the estimate and the
/// largest standard error.
std::vector<BetaRow> compute_beta_n(const VarianceProfile& profile, std::span<const long> n_list,
                                    std::span<const std::vector<double>> x_probes,
                                    const SmoothFunctional* g = nullptr,
                                    const LevyModel* model = nullptr, long mc_replicates = 0,
                                    std::uint64_t master_seed = 0);

struct VarianceConvergenceRow {
  long n = 0;
  double discrepancy = 0.0;  // E | sum_i E[(xi_i^n)^2 | F] - int_0^t A_s ds |
  double stderr_ = 0.0;
};

struct VarianceConvergenceReport {
  std::vector<VarianceConvergenceRow> rows;
  bool approximate = false;  // set when window > 0 (lag-sum analogue)
  bool decaying = false;
};

/// Checks the predictable-variance condition: the coarse-grid conditional
/// variance sum against the profile integral evaluated on a refined grid of
/// the same path.
VarianceConvergenceReport check_variance_convergence(const LevyModel& model,
                                                     const VarianceProfile& profile, int window,
                                                     std::span<const long> n_list, double t,
                                                     long replicates, std::uint64_t master_seed,
                                                     int refinement = 8, int workers = 1);

}  // namespace levymix
