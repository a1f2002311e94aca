#include "levymix/metric.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace levymix {

double numeric_sup(const TestFunction& psi, int order, double lo, double hi, double step) {
  double worst = 0.0;
  const long count = static_cast<long>((hi - lo) / step) + 1;
  for (long i = 0; i <= count; ++i) {
    const double x = std::min(hi, lo + step * static_cast<double>(i));
    worst = std::max(worst, std::abs(psi.deriv(order, x)));
  }
  return worst;
}

bool certify_member(const TestFunction& psi, bool analytic, std::vector<CertificationEntry>& out) {
  out.clear();
  bool ok = true;
  for (int l = 0; l <= 5; ++l) {
    CertificationEntry e;
    e.order = l;
    e.analytic = analytic;
    if (analytic) {
      e.bound = psi.certified()[static_cast<std::size_t>(l)];
    } else {
      // grid max; the built-in candidates decay past |x| = 50, which the
      // tail term of the certificate accounts for
      e.bound = numeric_sup(psi, l) + 1e-12;
    }
    e.margin = 1.0 - e.bound;
    ok = ok && e.bound <= 1.0;
    out.push_back(e);
  }
  return ok;
}

TestFamily build_default_family(std::size_t size) {
  if (size < 1) throw std::invalid_argument("build_default_family: size must be >= 1");
  TestFamily family;

  const std::size_t n_bumps = std::max<std::size_t>(1, size / 6);
  const std::size_t n_sin = size > n_bumps ? size - n_bumps : 0;

  // frequencies log-spaced over (0, 3], both phases per frequency
  const std::size_t n_freq = (n_sin + 1) / 2;
  const double a_max = 3.0, a_min = 0.25;
  std::size_t added_sin = 0;
  for (std::size_t i = 0; i < n_freq && added_sin < n_sin; ++i) {
    const double frac = n_freq == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(n_freq - 1);
    const double a = a_max * std::pow(a_min / a_max, 1.0 - frac);
    const double c = std::min(1.0, std::pow(a, -5.0));
    for (double b : {0.0, std::numbers::pi / 2.0}) {
      if (added_sin >= n_sin) break;
      TestFunction psi = TestFunction::sinusoid(c, a, b);
      std::vector<CertificationEntry> cert;
      if (certify_member(psi, true, cert))
        family.members.push_back(CertifiedMember{std::move(psi), std::move(cert)});
      else
        family.rejected.push_back(psi.name());
      ++added_sin;
    }
  }

  // Gaussian bumps rescaled so the largest derivative lands just under 1
  const double mus[4] = {-1.5, -0.5, 0.5, 1.5};
  const double ss[4] = {1.0, 1.25, 1.0, 1.25};
  for (std::size_t k = 0; k < n_bumps && family.members.size() < size; ++k) {
    const double mu = mus[k % 4];
    const double s = ss[k % 4] + 0.25 * static_cast<double>(k / 4);
    TestFunction raw = TestFunction::gauss_bump(1.0, mu, s);
    double worst = 0.0;
    for (int l = 0; l <= 5; ++l) worst = std::max(worst, numeric_sup(raw, l));
    const double amplitude = (1.0 - 1e-9) / worst;
    TestFunction psi = TestFunction::gauss_bump(amplitude, mu, s);
    std::vector<CertificationEntry> cert;
    if (certify_member(psi, false, cert))
      family.members.push_back(CertifiedMember{std::move(psi), std::move(cert)});
    else
      family.rejected.push_back(psi.name());
  }

  if (family.members.empty())
    throw std::runtime_error("build_default_family: certification rejected every candidate");
  return family;
}

DistanceEstimate estimate_distance(std::span<const double> samples_p,
                                   std::span<const double> samples_q, const TestFamily& family) {
  if (samples_p.empty() || samples_q.empty())
    throw std::invalid_argument("estimate_distance: both sample sets must be nonempty");
  if (family.members.empty()) throw std::invalid_argument("estimate_distance: empty family");

  DistanceEstimate est;
  const double mp = static_cast<double>(samples_p.size());
  const double mq = static_cast<double>(samples_q.size());
  for (std::size_t k = 0; k < family.members.size(); ++k) {
    const TestFunction& psi = family.members[k].psi;
    double sp = 0.0, spp = 0.0;
    for (double v : samples_p) {
      const double y = psi(v);
      sp += y;
      spp += y * y;
    }
    double sq = 0.0, sqq = 0.0;
    for (double v : samples_q) {
      const double y = psi(v);
      sq += y;
      sqq += y * y;
    }
    const double mean_p = sp / mp, mean_q = sq / mq;
    const double var_p = std::max(0.0, (spp - mp * mean_p * mean_p) / (mp - 1.0));
    const double var_q = std::max(0.0, (sqq - mq * mean_q * mean_q) / (mq - 1.0));
    est.member_diff.push_back(mean_p - mean_q);
    est.member_se.push_back(std::sqrt(var_p / mp + var_q / mq));
    if (std::abs(est.member_diff.back()) > est.d_hat) {
      est.d_hat = std::abs(est.member_diff.back());
      est.argmax = k;
      est.stderr_ = est.member_se.back();
    }
  }
  return est;
}

double cf_distance(std::span<const double> samples_p, std::span<const double> samples_q,
                   std::span<const double> u_grid) {
  if (u_grid.empty()) throw std::invalid_argument("cf_distance: empty u grid");
  if (samples_p.empty() || samples_q.empty())
    throw std::invalid_argument("cf_distance: both sample sets must be nonempty");
  double worst = 0.0;
  for (double u : u_grid) {
    std::complex<double> cp{0.0, 0.0}, cq{0.0, 0.0};
    for (double v : samples_p) cp += std::complex<double>(std::cos(u * v), std::sin(u * v));
    for (double v : samples_q) cq += std::complex<double>(std::cos(u * v), std::sin(u * v));
    cp /= static_cast<double>(samples_p.size());
    cq /= static_cast<double>(samples_q.size());
    worst = std::max(worst, std::abs(cp - cq));
  }
  return worst;
}

}  // namespace levymix
