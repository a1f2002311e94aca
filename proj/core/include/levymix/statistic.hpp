#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "levymix/functional.hpp"
#include "levymix/levy.hpp"

namespace levymix {

/// One centered rescaled statistic Z_t^(n) on one path.
struct StatisticSample {
  double value = 0.0;
  double t = 0.0;
  long n = 0;
  long replicate_index = 0;
};

/// Raw statistic: sum over i <= floor(nt) of g(X_{(i-1)/n}, I_{i,n}) with
/// I_{i,n} the a_n-scaled window of m+1 consecutive increments.
double compute_G(const PathSample& path, const SmoothFunctional& g, const GridSpec& grid, double a_n);

/// Centered statistic Z = n^{-1/2} sum_i f_n(X_{(i-1)/n}, I_{i,n}),
/// summed ascending with compensated summation.
StatisticSample compute_Z(const PathSample& path, const CenteredFunctional& f, const GridSpec& grid);

/// Independent replicates of Z, one fresh path per replicate; replicate r
/// draws from stream (master_seed, r, path), so output is identical for any
/// worker count.
std::vector<StatisticSample> sample_Z_batch(const LevyModel& model, const CenteredFunctional& f,
                                            const GridSpec& grid, long replicates,
                                            std::uint64_t master_seed, int workers = 1);

/// Joint sample of Z over increasing times plus the conditioning data the
/// stable-convergence checks need from the same path.
struct ZVectorSample {
  std::vector<double> z_increments;          // (Z_t1, Z_t2 - Z_t1, ...)
  std::vector<double> block_variance;        // per block: integral of gfrak(X_s) ds
  std::vector<std::vector<double>> x_probe;  // path values at the probe times
  long replicate_index = 0;
};

std::vector<ZVectorSample> sample_Z_vector(
    const LevyModel& model, const CenteredFunctional& f, const GridSpec& grid,
    std::span<const double> times, long replicates, std::uint64_t master_seed, int workers = 1,
    const std::function<double(std::span<const double>)>& gfrak = nullptr,
    std::span<const double> probe_times = {});

}  // namespace levymix
