#pragma once

#include <span>
#include <string>
#include <vector>

#include "levymix/test_function.hpp"

namespace levymix {

struct CertificationEntry {
  int order = 0;
  double bound = 0.0;     // certified sup-norm
  bool analytic = false;  // otherwise a dense-grid maximum with tail bound
  double margin = 0.0;    // 1 - bound
};

struct CertifiedMember {
  TestFunction psi;
  std::vector<CertificationEntry> certification;
};

/// A finite certified subset of the metric's test class: every member has
/// ||psi^(l)||_inf <= 1 for l = 0..5.
struct TestFamily {
  std::vector<CertifiedMember> members;
  std::vector<std::string> rejected;  // candidates that failed certification

  std::size_t size() const { return members.size(); }
};

/// Numeric certification: max over a grid of step `step` on [lo, hi]; for the
/// built-in shapes the tails decay, so the grid maximum plus a tiny margin
/// certifies the sup.
double numeric_sup(const TestFunction& psi, int order, double lo = -50.0, double hi = 50.0,
                   double step = 1e-3);

/// Certifies one candidate; returns false when any order exceeds 1.
bool certify_member(const TestFunction& psi, bool analytic, std::vector<CertificationEntry>& out);

/// Sinusoids c(a) sin(ax + b) with c(a) = min(1, a^-5), a log-spaced in
/// (0, 3], b in {0, pi/2}, plus Gaussian bumps rescaled to pass
/// certification. Throws if certification empties the family.
TestFamily build_default_family(std::size_t size = 24);

struct DistanceEstimate {
  double d_hat = 0.0;
  double stderr_ = 0.0;       // standard error of the argmax member
  std::size_t argmax = 0;
  std::vector<double> member_diff;  // signed difference per member
  std::vector<double> member_se;
};

/// d_hat = max over members of |mean_P psi - mean_Q psi|; a certified lower
/// bound of the smooth metric, so its observed decay is implied by the
/// theoretical upper bounds.
DistanceEstimate estimate_distance(std::span<const double> samples_p, std::span<const double> samples_q,
                                   const TestFamily& family);

/// Max over the u-grid of the modulus of the empirical characteristic
/// function difference; diagnostic companion to the smooth metric.
double cf_distance(std::span<const double> samples_p, std::span<const double> samples_q,
                   std::span<const double> u_grid);

}  // namespace levymix
