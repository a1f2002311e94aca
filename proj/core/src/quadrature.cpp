#include "levymix/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace levymix {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights come
// from the first component of the eigenvectors.
QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                            double weight_total) {
  const auto n = diag.size();
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    jacobi(i, i) = diag(i);
    if (i + 1 < n) {
      jacobi(i, i + 1) = offdiag(i);
      jacobi(i + 1, i) = offdiag(i);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success) throw std::runtime_error("quadrature: eigensolver failed");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[static_cast<std::size_t>(i)] = weight_total * v0 * v0;
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd off(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    off(static_cast<Eigen::Index>(k - 1)) = kk / std::sqrt(4.0 * kk * kk - 1.0);
  }
  QuadratureRule rule = golub_welsch(diag, off, 2.0);
  // map [-1,1] -> [a,b]
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

QuadratureRule gauss_hermite_prob(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_hermite_prob: n must be positive");
  // physicists' Hermite recurrence: off-diagonal sqrt(k/2), weight sqrt(pi)
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd off(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
  for (std::size_t k = 1; k < n; ++k)
    off(static_cast<Eigen::Index>(k - 1)) = std::sqrt(static_cast<double>(k) / 2.0);
  QuadratureRule rule = golub_welsch(diag, off, std::sqrt(std::numbers::pi));
  // rescale to the probabilists' convention: E[f(N)] = sum w_i f(z_i)
  const double norm = 1.0 / std::sqrt(std::numbers::pi);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] *= std::numbers::sqrt2;
    rule.weights[i] *= norm;
  }
  return rule;
}

}  // namespace levymix
