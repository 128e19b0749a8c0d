#pragma once

#include <vector>

namespace soh {

/// Gauss-Legendre rule on (-1, 1), nodes ascending.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule, exact for polynomials of degree <= 2n - 1.
GaussLegendre gauss_legendre(int n);

/// P_0..P_n at x (unnormalized Legendre polynomials).
std::vector<double> legendre_values(int n, double x);

/// Evaluate sum_k c_k P_k(x) and its derivative.
double legendre_series(const std::vector<double>& c, double x);
double legendre_series_derivative(const std::vector<double>& c, double x);

}  // namespace soh
