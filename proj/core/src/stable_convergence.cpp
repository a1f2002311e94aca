#include "levymix/stable_convergence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "levymix/parallel.hpp"

namespace levymix {

namespace {

double inner(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct PairStats {
  double sum = 0.0;
  double sumsq = 0.0;
  void add(double v) {
    sum += v;
    sumsq += v * v;
  }
  std::pair<double, double> mean_se(double m) const {
    const double mean = sum / m;
    const double var = std::max(0.0, (sumsq - m * mean * mean) / (m - 1.0));
    return {mean, std::sqrt(var / m)};
  }
};

bool summarize_decay(std::span<const long> n_list, const auto& cells, auto value_of) {
  if (n_list.size() < 2) return true;
  // per (probe, h/f) pair: |value| at the largest n below |value| at the smallest
  std::map<std::string, std::pair<double, double>> first_last;
  for (const auto& c : cells) {
    const std::string key = c.probe + "|" + [&] {
      if constexpr (requires { c.h; })
        return c.h;
      else
        return c.f;
    }();
    if (c.n == n_list.front()) first_last[key].first = std::abs(value_of(c));
    if (c.n == n_list.back()) first_last[key].second = std::abs(value_of(c));
  }
  bool ok = true;
  for (const auto& [key, fl] : first_last) ok = ok && fl.second <= fl.first;
  return ok;
}

}  // namespace

ConditioningProbe ConditioningProbe::trivial() { return ConditioningProbe{}; }

ConditioningProbe ConditioningProbe::real(std::vector<std::vector<double>> freqs,
                                          std::vector<double> times) {
  ConditioningProbe p;
  p.part = Part::Real;
  p.frequencies = std::move(freqs);
  p.times = std::move(times);
  if (p.frequencies.size() != p.times.size())
    throw std::invalid_argument("ConditioningProbe: need one frequency per time");
  return p;
}

ConditioningProbe ConditioningProbe::imag(std::vector<std::vector<double>> freqs,
                                          std::vector<double> times) {
  ConditioningProbe p = real(std::move(freqs), std::move(times));
  p.part = Part::Imag;
  return p;
}

double ConditioningProbe::eval(std::span<const std::vector<double>> x_at_times) const {
  if (part == Part::One) return 1.0;
  double phase = 0.0;
  for (std::size_t k = 0; k < frequencies.size(); ++k) phase += inner(frequencies[k], x_at_times[k]);
  const double value = part == Part::Real ? std::cos(phase) : std::sin(phase);
  if (!(std::abs(value) <= 1.0 + 1e-12)) throw std::logic_error("probe left the unit band");
  return value;
}

std::string ConditioningProbe::label() const {
  if (part == Part::One) return "F=1";
  std::string s = part == Part::Real ? "Re exp{i(" : "Im exp{i(";
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k) s += "+";
    s += "<v" + std::to_string(k + 1) + ",X(" + std::to_string(times[k]) + ")>";
  }
  return s + ")}";
}

ConditionH ConditionH::smoothed_square(double saturation) {
  const double L = saturation;
  return ConditionH{
      "logcosh(L=" + std::to_string(L) + ")",
      [L](std::span<const double> x, std::size_t k) { return L * std::tanh(x[k] / L); },
      [L](std::span<const double> x, std::size_t k) {
        const double c = std::cosh(x[k] / L);
        return 1.0 / (c * c);
      }};
}

ConditionH ConditionH::inverse_sqrt_product() {
  auto factor = [](double v) { return 1.0 / std::sqrt(1.0 + v * v); };
  return ConditionH{
      "prod(1+x^2)^-1/2",
      [factor](std::span<const double> x, std::size_t k) {
        double p = 1.0;
        for (std::size_t j = 0; j < x.size(); ++j)
          if (j != k) p *= factor(x[j]);
        const double xk = x[k];
        return p * (-xk) * std::pow(1.0 + xk * xk, -1.5);
      },
      [factor](std::span<const double> x, std::size_t k) {
        double p = 1.0;
        for (std::size_t j = 0; j < x.size(); ++j)
          if (j != k) p *= factor(x[j]);
        const double xk = x[k];
        return p * (2.0 * xk * xk - 1.0) * std::pow(1.0 + xk * xk, -2.5);
      }};
}

ConditionH ConditionH::sine_sum(double a) {
  return ConditionH{
      "sinsum(a=" + std::to_string(a) + ")",
      [a](std::span<const double> x, std::size_t k) { return std::cos(a * x[k]); },
      [a](std::span<const double> x, std::size_t k) { return -a * std::sin(a * x[k]); }};
}

ConditionH ConditionH::raw_quadratic() {
  return ConditionH{"x^2/2",
                    [](std::span<const double> x, std::size_t k) { return x[k]; },
                    [](std::span<const double>, std::size_t) { return 1.0; }};
}

std::vector<ConditionH> ConditionH::default_family() {
  return {smoothed_square(4.0), smoothed_square(1.0), inverse_sqrt_product(), sine_sum(1.0)};
}

BoundedF BoundedF::cosine(std::vector<double> u) {
  return BoundedF{"cos<u,.>", [u](std::span<const double> z) {
                    double phase = 0.0;
                    for (std::size_t k = 0; k < u.size() && k < z.size(); ++k) phase += u[k] * z[k];
                    return std::cos(phase);
                  }};
}

BoundedF BoundedF::smoothed_indicator(std::vector<double> level, double width) {
  return BoundedF{"smoothstep", [level, width](std::span<const double> z) {
                    double p = 1.0;
                    for (std::size_t k = 0; k < level.size() && k < z.size(); ++k)
                      p *= 0.5 * (1.0 + std::tanh((level[k] - z[k]) / width));
                    return p;
                  }};
}

std::vector<BoundedF> BoundedF::default_family(std::size_t r) {
  std::vector<double> u1(r, 1.0), u2(r);
  for (std::size_t k = 0; k < r; ++k) u2[k] = 2.0 / static_cast<double>(k + 1);
  std::vector<double> lv(r, 0.5);
  return {cosine(u1), cosine(u2), smoothed_indicator(lv, 0.5)};
}

SteinConditionReport check_stein_condition(const LevyModel& model, const CenteredFunctional& f,
                                           const VarianceProfile& profile, const GridSpec& grid,
                                           std::span<const long> n_list, std::span<const double> times,
                                           std::span<const ConditioningProbe> probes,
                                           std::span<const ConditionH> h_family, long replicates,
                                           std::uint64_t master_seed, int workers) {
  if (n_list.empty() || times.empty() || probes.empty() || h_family.empty())
    throw std::invalid_argument("check_stein_condition: empty inputs");
  const std::size_t r = times.size();

  // probe evaluation times, deduplicated across probes
  std::vector<double> probe_times;
  for (const auto& p : probes)
    for (double t : p.times) probe_times.push_back(t);
  std::sort(probe_times.begin(), probe_times.end());
  probe_times.erase(std::unique(probe_times.begin(), probe_times.end()), probe_times.end());

  SteinConditionReport rep;
  for (std::size_t in = 0; in < n_list.size(); ++in) {
    GridSpec g = grid;
    g.n = n_list[in];
    const std::uint64_t seed = master_seed + 7919ULL * static_cast<std::uint64_t>(in);
    const auto samples = sample_Z_vector(model, f, g, times, replicates, seed, workers, profile.gfrak,
                                         probe_times);

    for (const auto& probe : probes) {
      // map this probe's times into the deduplicated list
      std::vector<std::size_t> idx;
      for (double t : probe.times)
        idx.push_back(static_cast<std::size_t>(
            std::lower_bound(probe_times.begin(), probe_times.end(), t) - probe_times.begin()));

      for (const auto& h : h_family) {
        PairStats stats;
        std::vector<std::vector<double>> x_at(probe.times.size());
        for (const auto& sample : samples) {
          for (std::size_t k = 0; k < idx.size(); ++k) x_at[k] = sample.x_probe[idx[k]];
          const double probe_value = probe.eval(x_at);
          double term = 0.0;
          for (std::size_t k = 0; k < r; ++k) {
            term += sample.z_increments[k] * h.grad(sample.z_increments, k) -
                    sample.block_variance[k] * h.hess(sample.z_increments, k);
          }
          stats.add(probe_value * term);
        }
        auto [mean, se] = stats.mean_se(static_cast<double>(replicates));
        rep.cells.push_back(SteinConditionCell{n_list[in], probe.label(), h.name, mean, se});
      }
    }
  }
  rep.decaying = summarize_decay(n_list, rep.cells, [](const SteinConditionCell& c) { return c.statistic; });
  return rep;
}

StableLimitReport check_stable_limit(const LevyModel& model, const CenteredFunctional& f,
                                     const VarianceProfile& profile, const GridSpec& grid,
                                     std::span<const long> n_list, std::span<const double> times,
                                     std::span<const ConditioningProbe> probes,
                                     std::span<const BoundedF> f_family, long replicates,
                                     std::uint64_t master_seed, int workers) {
  if (n_list.empty() || times.empty() || probes.empty() || f_family.empty())
    throw std::invalid_argument("check_stable_limit: empty inputs");
  const std::size_t r = times.size();

  std::vector<double> probe_times;
  for (const auto& p : probes)
    for (double t : p.times) probe_times.push_back(t);
  std::sort(probe_times.begin(), probe_times.end());
  probe_times.erase(std::unique(probe_times.begin(), probe_times.end()), probe_times.end());

  StableLimitReport rep;
  for (std::size_t in = 0; in < n_list.size(); ++in) {
    GridSpec g = grid;
    g.n = n_list[in];
    const std::uint64_t seed = master_seed + 104729ULL * static_cast<std::uint64_t>(in);
    const auto samples = sample_Z_vector(model, f, g, times, replicates, seed, workers, profile.gfrak,
                                         probe_times);

    // coupled limit vector: same path's block variances, independent normals
    std::vector<std::vector<double>> limit(static_cast<std::size_t>(replicates));
    parallel_for(static_cast<std::size_t>(replicates), workers, [&](std::size_t rep_i) {
      RngStream noise(seed, rep_i, StreamRole::noise);
      std::vector<double> vec(r);
      for (std::size_t k = 0; k < r; ++k) {
        // paths along which the profile vanishes contribute f(0) deterministically
        const double v = std::max(0.0, samples[rep_i].block_variance[k]);
        vec[k] = std::sqrt(v) * noise.gaussian();
      }
      limit[rep_i] = std::move(vec);
    });

    for (const auto& probe : probes) {
      std::vector<std::size_t> idx;
      for (double t : probe.times)
        idx.push_back(static_cast<std::size_t>(
            std::lower_bound(probe_times.begin(), probe_times.end(), t) - probe_times.begin()));

      for (const auto& fb : f_family) {
        PairStats stats;
        std::vector<std::vector<double>> x_at(probe.times.size());
        for (std::size_t rep_i = 0; rep_i < samples.size(); ++rep_i) {
          for (std::size_t k = 0; k < idx.size(); ++k) x_at[k] = samples[rep_i].x_probe[idx[k]];
          const double probe_value = probe.eval(x_at);
          stats.add(probe_value * (fb.eval(samples[rep_i].z_increments) - fb.eval(limit[rep_i])));
        }
        auto [mean, se] = stats.mean_se(static_cast<double>(replicates));
        rep.cells.push_back(StableLimitCell{n_list[in], probe.label(), fb.name, mean, se});
      }
    }
  }
  rep.decaying = summarize_decay(n_list, rep.cells, [](const StableLimitCell& c) { return c.difference; });
  return rep;
}

}  // namespace levymix
