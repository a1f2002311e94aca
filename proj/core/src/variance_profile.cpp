#include "levymix/variance_profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "levymix/parallel.hpp"

namespace levymix {

VarianceProfile VarianceProfile::closed_form(std::shared_ptr<const CosineFunctional> g,
                                             const LevyModel& model) {
  const double factor = closed_form_gn_factor(*g, model);
  if (factor < -1e-12)
    throw std::logic_error("closed-form variance profile came out negative");
  auto f = [g, factor](std::span<const double> x) {
    const double w = g->weight().eval(x);
    return std::max(0.0, factor * w * w);
  };
  VarianceProfile p;
  p.gfrak = f;
  p.gfrak_n = [f](long, std::span<const double> x) { return f(x); };
  p.exact = true;
  return p;
}

VarianceProfile VarianceProfile::constant(double value) {
  VarianceProfile p;
  p.gfrak = [value](std::span<const double>) { return value; };
  p.gfrak_n = [value](long, std::span<const double>) { return value; };
  p.exact = true;
  return p;
}

McEstimate estimate_gn_mc(const SmoothFunctional& g, const LevyModel& model, long n,
                          std::span<const double> x, long replicates, RngStream& rng) {
  if (replicates < 2) throw std::invalid_argument("estimate_gn_mc: replicates must be >= 2");
  const int m = g.window();
  const int d = g.dim();
  // a_n * increment of length 1/n is scale^(1/alpha)-standard for every n
  const double step_scale =
      std::pow(model.scale / static_cast<double>(n), 1.0 / model.alpha) * normalization(model, n);

  // windows at shifts -m..m need 3m+1 iid scaled increments per replicate
  const int n_draws = 3 * m + 1;
  const std::size_t lags = static_cast<std::size_t>(2 * m + 1);
  std::vector<double> draws(static_cast<std::size_t>(n_draws) * d);
  std::vector<double> y(static_cast<std::size_t>(m + 1) * d);

  std::vector<double> a(static_cast<std::size_t>(replicates));
  std::vector<double> b(static_cast<std::size_t>(replicates) * lags);

  for (long r = 0; r < replicates; ++r) {
    for (auto& v : draws) v = step_scale * sample_stable_standard(model.alpha, rng);
    // window starting at draw index k: increments k..k+m (k = 0 is shift -m)
    auto eval_window = [&](int k) {
      for (int j = 0; j <= m; ++j)
        for (int c = 0; c < d; ++c)
          y[static_cast<std::size_t>(j) * d + c] = draws[static_cast<std::size_t>(k + j) * d + c];
      return g.eval(x, y);
    };
    a[static_cast<std::size_t>(r)] = eval_window(m);  // shift 0
    for (int j = -m; j <= m; ++j)
      b[static_cast<std::size_t>(r) * lags + static_cast<std::size_t>(j + m)] = eval_window(m + j);
  }

  const double mm = static_cast<double>(replicates);
  double a_bar = 0.0;
  for (double v : a) a_bar += v;
  a_bar /= mm;
  std::vector<double> b_bar(lags, 0.0);
  for (long r = 0; r < replicates; ++r)
    for (std::size_t j = 0; j < lags; ++j) b_bar[j] += b[static_cast<std::size_t>(r) * lags + j];
  for (auto& v : b_bar) v /= mm;

  // omega_r = sum_j (a_r - a_bar)(b_{j,r} - b_bar_j); the estimator is the
  // bias-corrected mean of omega and its spread gives the standard error
  double sum = 0.0, sumsq = 0.0;
  for (long r = 0; r < replicates; ++r) {
    double omega = 0.0;
    const double da = a[static_cast<std::size_t>(r)] - a_bar;
    for (std::size_t j = 0; j < lags; ++j)
      omega += da * (b[static_cast<std::size_t>(r) * lags + j] - b_bar[j]);
    sum += omega;
    sumsq += omega * omega;
  }
  McEstimate est;
  const double mean_omega = sum / mm;
  est.value = mean_omega * mm / (mm - 1.0);
  const double var_omega = std::max(0.0, (sumsq - mm * mean_omega * mean_omega) / (mm - 1.0));
  est.stderr_ = std::sqrt(var_omega / mm) * mm / (mm - 1.0);
  return est;
}

std::vector<double> compute_V_prefix(const PathSample& path, const VarianceProfile& profile, long n,
                                     std::span<const double> times) {
  if (!profile.gfrak) throw std::invalid_argument("compute_V_prefix: profile has no gfrak");
  std::vector<long> cuts;
  for (double t : times) {
    if (!(t >= 0.0)) throw std::invalid_argument("compute_V_prefix: negative time");
    GridSpec g;
    g.n = n;
    g.horizon = t;
    cuts.push_back(t == 0.0 ? 0 : g.steps());
  }
  for (std::size_t k = 1; k < cuts.size(); ++k)
    if (cuts[k] < cuts[k - 1]) throw std::invalid_argument("compute_V_prefix: times must be nondecreasing");
  if (!cuts.empty() && cuts.back() > path.n_increments() + 1)
    throw std::out_of_range("compute_V_prefix: path too short");

  std::vector<double> out(times.size(), 0.0);
  double running = 0.0;
  long i = 1;
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    for (; i <= cuts[k]; ++i) running += profile.gfrak(path.cumulative(i - 1));
    out[k] = running / static_cast<double>(n);
  }
  return out;
}

double compute_V(const PathSample& path, const VarianceProfile& profile, long n, double t) {
  const double times[1] = {t};
  return compute_V_prefix(path, profile, n, times)[0];
}

double compute_V_block(const PathSample& path, const VarianceProfile& profile, long n, double t0,
                       double t1) {
  const double times[2] = {t0, t1};
  const auto v = compute_V_prefix(path, profile, n, times);
  return v[1] - v[0];
}

std::vector<LimitSample> sample_limit(const LevyModel& model, const VarianceProfile& profile,
                                      const GridSpec& grid, long replicates,
                                      std::uint64_t master_seed, int workers) {
  if (replicates < 1) throw std::invalid_argument("sample_limit: replicates must be >= 1");
  std::vector<LimitSample> out(static_cast<std::size_t>(replicates));
  parallel_for(static_cast<std::size_t>(replicates), workers, [&](std::size_t r) {
    RngStream path_rng(master_seed, r, StreamRole::limit);
    const PathSample path = sample_path(model, grid, path_rng);
    const double v = compute_V(path, profile, grid.n, grid.horizon);
    RngStream noise_rng(master_seed, r, StreamRole::noise);
    LimitSample s;
    // Monte Carlo noise may dip slightly below zero; the law needs v >= 0
    s.v = std::max(0.0, v);
    s.value = std::sqrt(s.v) * noise_rng.gaussian();
    s.replicate_index = static_cast<long>(r);
    out[r] = s;
  });
  return out;
}

std::vector<BetaRow> compute_beta_n(const VarianceProfile& profile, std::span<const long> n_list,
                                    std::span<const std::vector<double>> x_probes,
                                    const SmoothFunctional* g, const LevyModel* model,
                                    long mc_replicates, std::uint64_t master_seed) {
  if (x_probes.empty()) throw std::invalid_argument("compute_beta_n: probe grid must be nonempty");
  if (n_list.empty()) throw std::invalid_argument("compute_beta_n: n_list must be nonempty");
  std::vector<BetaRow> rows;
  for (std::size_t k = 0; k < n_list.size(); ++k) {
    const long n = n_list[k];
    BetaRow row;
    row.n = n;
    if (mc_replicates <= 0) {
      // exact mode: sup over probes of |gfrak_n - gfrak|
      for (const auto& x : x_probes)
        row.beta = std::max(row.beta, std::abs(profile.gfrak_n(n, x) - profile.gfrak(x)));
    } else {
      if (g == nullptr || model == nullptr)
        throw std::invalid_argument("compute_beta_n: MC mode needs the functional and model");
      for (std::size_t p = 0; p < x_probes.size(); ++p) {
        RngStream rng(master_seed, k * x_probes.size() + p, StreamRole::inner);
        const McEstimate est = estimate_gn_mc(*g, *model, n, x_probes[p], mc_replicates, rng);
        row.beta = std::max(row.beta, std::abs(est.value - profile.gfrak(x_probes[p])));
        row.max_se = std::max(row.max_se, est.stderr_);
      }
    }
    rows.push_back(row);
  }
  return rows;
}

VarianceConvergenceReport check_variance_convergence(const LevyModel& model,
                                                     const VarianceProfile& profile, int window,
                                                     std::span<const long> n_list, double t,
                                                     long replicates, std::uint64_t master_seed,
                                                     int refinement, int workers) {
  if (n_list.empty()) throw std::invalid_argument("check_variance_convergence: empty n_list");
  if (refinement < 2) throw std::invalid_argument("check_variance_convergence: refinement must be >= 2");
  VarianceConvergenceReport rep;
  rep.approximate = window > 0;

  for (std::size_t k = 0; k < n_list.size(); ++k) {
    const long n = n_list[k];
    const long n_fine = n * refinement;
    GridSpec fine;
    fine.n = n_fine;
    fine.horizon = t;
    fine.dim = model.dim;
    fine.validate();

    std::vector<double> diffs(static_cast<std::size_t>(replicates));
    parallel_for(static_cast<std::size_t>(replicates), workers, [&](std::size_t r) {
      RngStream rng(master_seed, k * static_cast<std::size_t>(replicates) + r, StreamRole::path);
      const PathSample path = sample_path(model, fine, rng);
      // conditional-variance sum on the coarse grid: every refinement-th point
      GridSpec coarse;
      coarse.n = n;
      coarse.horizon = t;
      coarse.dim = model.dim;
      double cond = 0.0;
      const long coarse_steps = coarse.steps();
      for (long i = 1; i <= coarse_steps; ++i)
        cond += profile.gfrak_n(n, path.cumulative((i - 1) * refinement));
      cond /= static_cast<double>(n);
      const double v_fine = compute_V(path, profile, n_fine, t);
      diffs[r] = std::abs(cond - v_fine);
    });

    VarianceConvergenceRow row;
    row.n = n;
    double sum = 0.0, sumsq = 0.0;
    for (double v : diffs) {
      sum += v;
      sumsq += v * v;
    }
    const double m = static_cast<double>(replicates);
    row.discrepancy = sum / m;
    row.stderr_ = std::sqrt(std::max(0.0, (sumsq - m * row.discrepancy * row.discrepancy) / (m - 1.0)) / m);
    rep.rows.push_back(row);
  }
  rep.decaying = rep.rows.size() < 2 || rep.rows.back().discrepancy < rep.rows.front().discrepancy;
  return rep;
}

}  // namespace levymix
