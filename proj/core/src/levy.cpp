#include "levymix/levy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace levymix {

namespace {

// floor(n*t) with a one-ulp cushion so grid-aligned horizons do not drop a step.
long floor_steps(long n, double t) {
  const double nt = static_cast<double>(n) * t;
  return static_cast<long>(std::floor(nt * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())));
}

// Weighted least squares slope of y against x; returns {slope, se}.
std::pair<double, double> wls_slope(std::span<const double> x, std::span<const double> y,
                                    std::span<const double> w) {
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double xbar = sx / sw, ybar = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  const double slope = sxy / sxx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - ybar - slope * (x[i] - xbar);
    rss += w[i] * r * r;
  }
  const double dof = std::max<double>(1.0, static_cast<double>(x.size()) - 2.0);
  const double se = std::sqrt(rss / dof / sxx);
  return {slope, se};
}

}  // namespace

LevyModel LevyModel::stable(double alpha, double scale, int dim) {
  LevyModel m{ModelKind::SymmetricStable, alpha, scale, dim};
  m.validate();
  return m;
}

LevyModel LevyModel::brownian(double scale, int dim) {
  // alpha = 2 by definition of the Gaussian member.
  LevyModel m{ModelKind::Brownian, 2.0, scale, dim};
  m.validate();
  return m;
}

void LevyModel::validate() const {
  if (!(alpha > 0.0) || !(alpha <= 2.0)) throw std::invalid_argument("LevyModel: alpha must lie in (0,2]");
  if (!(scale > 0.0)) throw std::invalid_argument("LevyModel: scale must be positive");
  if (dim < 1) throw std::invalid_argument("LevyModel: dim must be >= 1");
  if (kind == ModelKind::Brownian && alpha != 2.0)
    throw std::invalid_argument("LevyModel: Brownian motion has alpha = 2");
}

void GridSpec::validate() const {
  if (n < 1) throw std::invalid_argument("GridSpec: n must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("GridSpec: horizon must be positive");
  if (window < 0) throw std::invalid_argument("GridSpec: window must be >= 0");
  if (dim < 1) throw std::invalid_argument("GridSpec: dim must be >= 1");
  if (steps() < 1) throw std::invalid_argument("GridSpec: floor(n * horizon) must be >= 1");
}

long GridSpec::steps() const { return floor_steps(n, horizon); }

long GridSpec::increments_needed() const { return steps() + window; }

PathSample::PathSample(long n_increments, int dim)
    : n_increments_(n_increments),
      dim_(dim),
      increments_(static_cast<std::size_t>(n_increments) * dim),
      cumulative_(static_cast<std::size_t>(n_increments + 1) * dim, 0.0) {}

void PathSample::accumulate() {
  for (int c = 0; c < dim_; ++c) cumulative_[c] = 0.0;
  for (long k = 0; k < n_increments_; ++k) {
    const std::size_t row = static_cast<std::size_t>(k) * dim_;
    for (int c = 0; c < dim_; ++c)
      cumulative_[row + dim_ + c] = cumulative_[row + c] + increments_[row + c];
  }
}

double sample_stable_standard(double alpha, RngStream& rng) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw std::invalid_argument("sample_stable_standard: alpha must lie in (0,2]");
  if (alpha == 2.0) {
    // exp(-u^2) is the N(0,2) characteristic function
    return std::numbers::sqrt2 * rng.gaussian();
  }
  if (alpha == 1.0) {
    // standard Cauchy
    return std::tan(std::numbers::pi * (rng.uniform01() - 0.5));
  }
  // Chambers-Mallows-Stuck, symmetric case
  const double theta = std::numbers::pi * (rng.uniform01() - 0.5);
  const double w = rng.exponential();
  const double a = std::sin(alpha * theta) / std::pow(std::cos(theta), 1.0 / alpha);
  const double b = std::pow(std::cos((1.0 - alpha) * theta) / w, (1.0 - alpha) / alpha);
  return a * b;
}

double normalization(const LevyModel& model, long n) {
  if (n < 1) throw std::invalid_argument("normalization: n must be >= 1");
  return std::pow(static_cast<double>(n), 1.0 / model.alpha);
}

double sample_marginal(const LevyModel& model, double t, RngStream& rng) {
  if (!(t > 0.0)) throw std::invalid_argument("sample_marginal: t must be positive");
  return std::pow(model.scale * t, 1.0 / model.alpha) * sample_stable_standard(model.alpha, rng);
}

PathSample sample_path(const LevyModel& model, const GridSpec& grid, RngStream& rng) {
  model.validate();
  grid.validate();
  if (model.dim != grid.dim) throw std::invalid_argument("sample_path: model and grid dims differ");
  const long rows = grid.increments_needed();
  const double step_scale = std::pow(model.scale / static_cast<double>(grid.n), 1.0 / model.alpha);
  PathSample path(rows, model.dim);
  for (long k = 0; k < rows; ++k) {
    auto inc = path.increment(k);
    for (int c = 0; c < model.dim; ++c) inc[c] = step_scale * sample_stable_standard(model.alpha, rng);
  }
  path.accumulate();
  return path;
}

TailBoundReport check_tail_bound(const LevyModel& model, double t, std::span<const double> s_grid,
                                 long replicates, std::uint64_t master_seed) {
  model.validate();
  if (s_grid.empty()) throw std::invalid_argument("check_tail_bound: empty s_grid");
  for (double s : s_grid)
    if (!(s > 0.0)) throw std::invalid_argument("check_tail_bound: s_grid must be positive");
  if (replicates < 2) throw std::invalid_argument("check_tail_bound: replicates must be >= 2");

  std::vector<long> exceed(s_grid.size(), 0);
  for (long r = 0; r < replicates; ++r) {
    RngStream rng(master_seed, static_cast<std::uint64_t>(r), StreamRole::path);
    const double x = std::abs(sample_marginal(model, t, rng));
    for (std::size_t j = 0; j < s_grid.size(); ++j)
      if (x >= s_grid[j]) ++exceed[j];
  }

  TailBoundReport rep;
  rep.s_grid.assign(s_grid.begin(), s_grid.end());
  const double m = static_cast<double>(replicates);
  for (std::size_t j = 0; j < s_grid.size(); ++j) {
    const double p = static_cast<double>(exceed[j]) / m;
    // continuity floor keeps the CI open in the deep tail
    const double p_floor = std::max(p, 1.0 / m);
    rep.tail_prob.push_back(p);
    rep.tail_se.push_back(std::sqrt(p_floor * (1.0 - p_floor) / m));
    rep.kappa_at_s.push_back(p * std::pow(s_grid[j], model.alpha) / t);
    if (exceed[j] < 20)
      rep.warnings.push_back("tail undersampled at s = " + std::to_string(s_grid[j]) +
                             "; CI widened by the 1/M floor");
  }
  rep.kappa_hat = *std::max_element(rep.kappa_at_s.begin(), rep.kappa_at_s.end());

  // A bound of the form kappa t s^-alpha exists iff p(s) s^alpha stays bounded;
  // flag when the largest-s estimates keep growing beyond their CIs.
  const std::size_t last = s_grid.size() - 1;
  if (s_grid.size() >= 3) {
    const double head = *std::max_element(rep.kappa_at_s.begin(), rep.kappa_at_s.end() - 1);
    const double se_last = rep.tail_se[last] * std::pow(s_grid[last], model.alpha) / t;
    rep.violation = rep.kappa_at_s[last] - 3.0 * se_last > 2.0 * head;
  }

  if (model.alpha == 2.0) {
    // fit P[|X_t| >= s] ~ (t s^-2)^gamma on the points with enough mass
    std::vector<double> lx, ly, w;
    for (std::size_t j = 0; j < s_grid.size(); ++j) {
      if (exceed[j] >= 5 && rep.tail_prob[j] < 0.5) {
        lx.push_back(std::log(t / (s_grid[j] * s_grid[j])));
        ly.push_back(std::log(rep.tail_prob[j]));
        w.push_back(1.0);
      }
    }
    if (lx.size() >= 2) {
      auto [slope, se] = wls_slope(lx, ly, w);
      rep.gamma_hat = slope;
      rep.h3_consistent = slope - 3.0 * se > 1.0;
    } else {
      rep.warnings.push_back("H3 fit skipped: too few usable tail points");
    }
  }
  return rep;
}

MomentReport estimate_truncated_moments(const LevyModel& model, std::span<const long> n_list,
                                        long replicates, std::uint64_t master_seed) {
  model.validate();
  if (n_list.empty()) throw std::invalid_argument("estimate_truncated_moments: empty n_list");
  if (replicates < 2) throw std::invalid_argument("estimate_truncated_moments: replicates must be >= 2");

  MomentReport rep;
  for (std::size_t row = 0; row < n_list.size(); ++row) {
    const long n = n_list[row];
    if (n < 1) throw std::invalid_argument("estimate_truncated_moments: n must be >= 1");
    const double step_scale = std::pow(model.scale / static_cast<double>(n), 1.0 / model.alpha);
    std::array<double, 3> sum{}, sumsq{};
    for (long r = 0; r < replicates; ++r) {
      // row folded into the replicate key: rows are independent samples
      const std::uint64_t rep = static_cast<std::uint64_t>(row) * static_cast<std::uint64_t>(replicates) +
                                static_cast<std::uint64_t>(r);
      RngStream rng(master_seed, rep, StreamRole::path);
      double norm2 = 0.0;
      for (int c = 0; c < model.dim; ++c) {
        const double x = step_scale * sample_stable_standard(model.alpha, rng);
        norm2 += x * x;
      }
      const double norm = std::sqrt(norm2);
      const std::array<double, 3> v{std::min(1.0, norm), std::min(1.0, norm2),
                                    std::min(norm, norm2)};
      for (int j = 0; j < 3; ++j) {
        sum[j] += v[j];
        sumsq[j] += v[j] * v[j];
      }
    }
    MomentRow out;
    out.n = n;
    const double m = static_cast<double>(replicates);
    for (int j = 0; j < 3; ++j) {
      out.mean[j] = sum[j] / m;
      const double var = std::max(0.0, (sumsq[j] - m * out.mean[j] * out.mean[j]) / (m - 1.0));
      out.stderr_[j] = std::sqrt(var / m);
    }
    rep.rows.push_back(out);
  }

  // log-log slopes, SE-weighted via the delta method
  for (int j = 0; j < 3; ++j) {
    std::vector<double> lx, ly, w;
    for (const auto& r : rep.rows) {
      if (r.mean[j] <= 0.0) continue;
      lx.push_back(std::log(static_cast<double>(r.n)));
      ly.push_back(std::log(r.mean[j]));
      const double rel = std::max(1e-12, r.stderr_[j] / r.mean[j]);
      w.push_back(1.0 / (rel * rel));
    }
    if (lx.size() >= 2) {
      auto [slope, se] = wls_slope(lx, ly, w);
      rep.slope[j] = slope;
      rep.slope_se[j] = se;
    }
  }
  return rep;
}

}  // namespace levymix
