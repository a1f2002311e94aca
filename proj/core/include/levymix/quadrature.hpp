#pragma once

#include <cstddef>
#include <vector>

namespace levymix {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [a, b]; exact for polynomials of degree 2n-1.
QuadratureRule gauss_legendre(std::size_t n, double a = -1.0, double b = 1.0);

/// Gauss-Hermite rule in probabilists' form: sum w_i f(z_i) approximates
/// E[f(N)] for N standard normal.
QuadratureRule gauss_hermite_prob(std::size_t n);

}  // namespace levymix
