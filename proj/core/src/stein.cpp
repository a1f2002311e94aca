#include "levymix/stein.hpp"

#include <algorithm>
#include <cmath>

namespace levymix {

namespace {

std::vector<double> default_probe_grid_x() {
  std::vector<double> xs;
  for (int i = -10; i <= 10; ++i) xs.push_back(0.5 * i);
  return xs;
}

std::pair<double, double> ols_slope(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double xbar = sx / n, ybar = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxy += (x[i] - xbar) * (y[i] - ybar);
  }
  const double slope = sxy / sxx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - ybar - slope * (x[i] - xbar);
    rss += r * r;
  }
  const double dof = std::max(1.0, n - 2.0);
  return {slope, std::sqrt(rss / dof / sxx)};
}

}  // namespace

SteinSolution::SteinSolution(const TestFunction& psi, double gamma, SteinQuadratureSpec spec)
    : psi_(&psi),
      gamma_(gamma),
      spec_(spec),
      semigroup_(gauss_legendre(spec.semigroup_nodes, 0.0, 1.0)),
      gauss_(gauss_hermite_prob(spec.gaussian_nodes)) {
  const double sg = std::sqrt(gamma_);
  double mean = 0.0;
  for (std::size_t j = 0; j < gauss_.nodes.size(); ++j)
    mean += gauss_.weights[j] * psi.deriv(0, sg * gauss_.nodes[j]);
  psi_mean_ = mean;
}

double SteinSolution::raw_h_prime(double x) const {
  const double sg = std::sqrt(gamma_);
  double outer = 0.0;
  for (std::size_t i = 0; i < semigroup_.nodes.size(); ++i) {
    const double u = semigroup_.nodes[i];
    const double b = std::sqrt(std::max(0.0, 1.0 - u * u)) * sg;
    double inner = 0.0;
    for (std::size_t j = 0; j < gauss_.nodes.size(); ++j)
      inner += gauss_.weights[j] * psi_->deriv(1, u * x + b * gauss_.nodes[j]);
    outer += semigroup_.weights[i] * inner;
  }
  return -outer;
}

double SteinSolution::raw_h_dprime(double x) const {
  const double sg = std::sqrt(gamma_);
  double outer = 0.0;
  for (std::size_t i = 0; i < semigroup_.nodes.size(); ++i) {
    const double u = semigroup_.nodes[i];
    const double b = std::sqrt(std::max(0.0, 1.0 - u * u)) * sg;
    double inner = 0.0;
    for (std::size_t j = 0; j < gauss_.nodes.size(); ++j)
      inner += gauss_.weights[j] * psi_->deriv(2, u * x + b * gauss_.nodes[j]);
    outer += semigroup_.weights[i] * u * inner;
  }
  return -outer;
}

double SteinSolution::h_prime(double x) const { return sign_ * raw_h_prime(x); }

double SteinSolution::h_double_prime(double x) const { return sign_ * raw_h_dprime(x); }

double SteinSolution::residual(double x) const {
  return x * h_prime(x) - gamma_ * h_double_prime(x) - (psi_->deriv(0, x) - psi_mean_);
}

double SteinSolution::stability_certificate(std::span<const double> probes) const {
  SteinQuadratureSpec doubled{spec_.semigroup_nodes * 2, spec_.gaussian_nodes * 2};
  SteinSolution fine(*psi_, gamma_, doubled);
  fine.sign_ = sign_;
  double worst = 0.0;
  for (double x : probes) worst = std::max(worst, std::abs(h_prime(x) - fine.h_prime(x)));
  return worst;
}

SteinSolution solve_stein(const TestFunction& psi, double gamma, SteinQuadratureSpec spec,
                          double tolerance, int max_refinements) {
  if (!(gamma > 0.0)) throw std::invalid_argument("solve_stein: gamma must be positive");
  const std::vector<double> probes = default_probe_grid_x();

  std::vector<double> residuals;
  for (int level = 0; level <= max_refinements; ++level) {
    SteinSolution sol(psi, gamma, spec);

    // resolve the representation sign against the residual at small probes
    double rss_plus = 0.0, rss_minus = 0.0;
    for (double x : {-1.0, 0.0, 1.0}) {
      sol.sign_ = 1.0;
      const double rp = sol.residual(x);
      sol.sign_ = -1.0;
      const double rm = sol.residual(x);
      rss_plus += rp * rp;
      rss_minus += rm * rm;
    }
    sol.sign_ = rss_minus < rss_plus ? -1.0 : 1.0;

    residuals.clear();
    double worst = 0.0;
    for (double x : probes) {
      residuals.push_back(sol.residual(x));
      worst = std::max(worst, std::abs(residuals.back()));
    }
    if (worst <= tolerance) return sol;
    spec.semigroup_nodes *= 2;
    spec.gaussian_nodes *= 2;
  }
  throw SteinSolveError("solve_stein: residual above tolerance after max refinement", probes,
                        residuals);
}

double compute_Vpsi(const TestFunction& psi, double x, SteinQuadratureSpec spec) {
  const QuadratureRule semigroup = gauss_legendre(spec.semigroup_nodes, 0.0, 1.0);
  const QuadratureRule gauss = gauss_hermite_prob(spec.gaussian_nodes);
  double outer = 0.0;
  for (std::size_t i = 0; i < semigroup.nodes.size(); ++i) {
    const double u = semigroup.nodes[i];
    const double b2 = std::max(0.0, 1.0 - u * u);
    const double b = std::sqrt(b2);
    double inner = 0.0;
    for (std::size_t j = 0; j < gauss.nodes.size(); ++j)
      inner += gauss.weights[j] * psi.deriv(3, u * x + b * gauss.nodes[j]);
    outer += semigroup.weights[i] * b2 * inner;
  }
  return -outer;
}

TaylorReport check_hprime_taylor(const TestFunction& psi, double gamma,
                                 std::span<const double> gamma_tilde_list,
                                 std::span<const double> x_grid, SteinQuadratureSpec spec) {
  if (!(gamma > 0.0)) throw std::invalid_argument("check_hprime_taylor: gamma must be positive");
  TaylorReport rep;
  // sensitivity of the residual-sign h' at unit variance: d h'/d gamma = -V[psi]/2
  rep.coefficient = -0.5;

  const SteinSolution base = solve_stein(psi, gamma, spec);
  std::vector<double> vpsi;
  vpsi.reserve(x_grid.size());
  for (double x : x_grid) vpsi.push_back(compute_Vpsi(psi, x, spec));

  std::vector<double> lx, ly;
  for (double gt : gamma_tilde_list) {
    if (!(gt > 0.0)) throw std::invalid_argument("check_hprime_taylor: gamma_tilde must be positive");
    TaylorRow row;
    row.gamma_tilde = gt;
    if (gt == gamma) {
      row.max_error = 0.0;
      rep.rows.push_back(row);
      continue;
    }
    const SteinSolution other = solve_stein(psi, gt, spec);
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      const double err = base.h_prime(x_grid[i]) - other.h_prime(x_grid[i]) -
                         rep.coefficient * (gamma - gt) * vpsi[i];
      row.max_error = std::max(row.max_error, std::abs(err));
    }
    rep.rows.push_back(row);
    if (row.max_error > 0.0) {
      lx.push_back(std::log(std::abs(gamma - gt)));
      ly.push_back(std::log(row.max_error));
    }
  }
  if (lx.size() >= 2) {
    auto [slope, se] = ols_slope(lx, ly);
    rep.slope = slope;
    rep.slope_se = se;
  }
  return rep;
}

GaussianDistanceReport check_gaussian_distance_lemma(const TestFunction& psi,
                                                     std::span<const double> sigma_grid,
                                                     std::span<const double> s_grid,
                                                     std::size_t gaussian_nodes) {
  const QuadratureRule gauss = gauss_hermite_prob(gaussian_nodes);
  auto expect = [&](int order, double sd) {
    double sum = 0.0;
    for (std::size_t j = 0; j < gauss.nodes.size(); ++j)
      sum += gauss.weights[j] * psi.deriv(order, sd * gauss.nodes[j]);
    return sum;
  };
  GaussianDistanceReport rep;
  rep.all_pass = true;
  const double psi4 = psi.certified()[4];
  for (double sigma : sigma_grid) {
    for (double s : s_grid) {
      GaussianDistanceCell cell;
      cell.sigma = sigma;
      cell.s = s;
      const double dv = sigma * sigma - s * s;
      cell.left = std::abs(expect(0, sigma) - expect(0, s) - 0.5 * dv * expect(2, s));
      cell.bound = 4.0 * psi4 * dv * dv;
      cell.pass = cell.left <= cell.bound + 1e-14;
      rep.all_pass = rep.all_pass && cell.pass;
      rep.cells.push_back(cell);
    }
  }
  return rep;
}

}  // namespace levymix
