#pragma once

// 1-D quadrature rules (Gauss-Hermite with weight e^{-x^2}, Gauss-Legendre on
// [-1,1] mapped to [a,b]) built by Golub-Welsch.  Rules are cached; nodes are
// ascending so every downstream reduction has a fixed summation order.

#include <vector>

namespace htg {

struct QuadratureRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  int exactness_degree = 0;  // polynomials integrated exactly (2n-1)
};

// \int f(x) e^{-x^2} dx  ~  sum_i w_i f(x_i)
const QuadratureRule1D& gauss_hermite(int n);

// \int_a^b f(x) dx  ~  sum_i w_i f(x_i)
QuadratureRule1D gauss_legendre(int n, double a, double b);

}  // namespace htg
