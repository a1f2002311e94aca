#include "levymix/statistic.hpp"

#include <cmath>
#include <stdexcept>

#include "levymix/parallel.hpp"

namespace levymix {

namespace {

// Neumaier compensated accumulator; fixed order keeps runs bit-identical.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

void check_path(const PathSample& path, const SmoothFunctional& g, const GridSpec& grid) {
  if (g.window() != grid.window) throw std::invalid_argument("window of g and grid differ");
  if (g.dim() != grid.dim || path.dim() != grid.dim) throw std::invalid_argument("dimension mismatch");
  if (path.n_increments() < grid.increments_needed())
    throw std::out_of_range("path too short: needs " + std::to_string(grid.increments_needed()) +
                            " increments, has " + std::to_string(path.n_increments()));
}

}  // namespace

double compute_G(const PathSample& path, const SmoothFunctional& g, const GridSpec& grid,
                 double a_n) {
  check_path(path, g, grid);
  const long steps = grid.steps();
  const int m = grid.window;
  const int d = grid.dim;
  std::vector<double> y(static_cast<std::size_t>(m + 1) * d);
  double sum = 0.0;
  for (long i = 1; i <= steps; ++i) {
    for (int j = 0; j <= m; ++j) {
      const auto inc = path.increment(i - 1 + j);
      for (int c = 0; c < d; ++c) y[static_cast<std::size_t>(j) * d + c] = a_n * inc[c];
    }
    sum += g.eval(path.cumulative(i - 1), y);
  }
  return sum;
}

StatisticSample compute_Z(const PathSample& path, const CenteredFunctional& f, const GridSpec& grid) {
  check_path(path, f.functional(), grid);
  const long steps = grid.steps();
  const int m = grid.window;
  const int d = grid.dim;
  const double a_n = normalization(f.model(), grid.n);
  std::vector<double> y(static_cast<std::size_t>(m + 1) * d);
  CompensatedSum acc;
  for (long i = 1; i <= steps; ++i) {
    for (int j = 0; j <= m; ++j) {
      const auto inc = path.increment(i - 1 + j);
      for (int c = 0; c < d; ++c) y[static_cast<std::size_t>(j) * d + c] = a_n * inc[c];
    }
    acc.add(f.eval(path.cumulative(i - 1), y));
  }
  StatisticSample s;
  s.value = acc.value() / std::sqrt(static_cast<double>(grid.n));
  s.t = grid.horizon;
  s.n = grid.n;
  // crude bound |Z| <= 2 ||g||_inf floor(nt) / sqrt(n), from |f_n| <= 2||g||
  const double bound =
      2.0 * f.functional().bounds().g * static_cast<double>(steps) / std::sqrt(static_cast<double>(grid.n));
  if (!(std::abs(s.value) <= bound * (1.0 + 1e-12) + 1e-300))
    throw std::logic_error("compute_Z: crude bound violated, statistic not finite?");
  return s;
}

std::vector<StatisticSample> sample_Z_batch(const LevyModel& model, const CenteredFunctional& f,
                                            const GridSpec& grid, long replicates,
                                            std::uint64_t master_seed, int workers) {
  if (replicates < 1) throw std::invalid_argument("sample_Z_batch: replicates must be >= 1");
  std::vector<StatisticSample> out(static_cast<std::size_t>(replicates));
  parallel_for(static_cast<std::size_t>(replicates), workers, [&](std::size_t r) {
    RngStream rng(master_seed, r, StreamRole::path);
    const PathSample path = sample_path(model, grid, rng);
    StatisticSample s = compute_Z(path, f, grid);
    s.replicate_index = static_cast<long>(r);
    out[r] = s;
  });
  return out;
}

std::vector<ZVectorSample> sample_Z_vector(const LevyModel& model, const CenteredFunctional& f,
                                           const GridSpec& grid, std::span<const double> times,
                                           long replicates, std::uint64_t master_seed, int workers,
                                           const std::function<double(std::span<const double>)>& gfrak,
                                           std::span<const double> probe_times) {
  if (times.empty()) throw std::invalid_argument("sample_Z_vector: times must be nonempty");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1]))
      throw std::invalid_argument("sample_Z_vector: times must be strictly increasing");
  if (!(times.front() > 0.0)) throw std::invalid_argument("sample_Z_vector: times must be positive");
  if (replicates < 1) throw std::invalid_argument("sample_Z_vector: replicates must be >= 1");

  GridSpec full = grid;
  full.horizon = times.back();
  full.validate();
  const long steps = full.steps();
  const int m = full.window;
  const int d = full.dim;
  const double a_n = normalization(model, full.n);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(full.n));

  // block boundaries in step index space
  std::vector<long> cuts;
  cuts.push_back(0);
  for (double t : times) {
    GridSpec gt = grid;
    gt.horizon = t;
    cuts.push_back(gt.steps());
  }

  std::vector<ZVectorSample> out(static_cast<std::size_t>(replicates));
  parallel_for(static_cast<std::size_t>(replicates), workers, [&](std::size_t r) {
    RngStream rng(master_seed, r, StreamRole::path);
    const PathSample path = sample_path(model, full, rng);

    ZVectorSample sample;
    sample.replicate_index = static_cast<long>(r);
    std::vector<double> y(static_cast<std::size_t>(m + 1) * d);

    for (std::size_t k = 1; k < cuts.size(); ++k) {
      CompensatedSum acc;
      CompensatedSum vacc;
      for (long i = cuts[k - 1] + 1; i <= cuts[k]; ++i) {
        for (int j = 0; j <= m; ++j) {
          const auto inc = path.increment(i - 1 + j);
          for (int c = 0; c < d; ++c) y[static_cast<std::size_t>(j) * d + c] = a_n * inc[c];
        }
        acc.add(f.eval(path.cumulative(i - 1), y));
        if (gfrak) vacc.add(gfrak(path.cumulative(i - 1)));
      }
      sample.z_increments.push_back(acc.value() * inv_sqrt_n);
      if (gfrak) sample.block_variance.push_back(vacc.value() / static_cast<double>(full.n));
    }
    for (double eps : probe_times) {
      GridSpec ge = grid;
      ge.horizon = eps;
      const long idx = std::min(ge.steps(), steps);
      const auto xv = path.cumulative(idx);
      sample.x_probe.emplace_back(xv.begin(), xv.end());
    }
    out[r] = std::move(sample);
  });
  return out;
}

}  // namespace levymix
