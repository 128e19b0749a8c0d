#include "soh/gauss_legendre.hpp"

#include <cmath>
#include <numbers>

#include "soh/errors.hpp"

namespace soh {

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "Gauss-Legendre rule needs n >= 1");
  GaussLegendre rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton on P_n starting from the Chebyshev-like guess; symmetric pairs.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

std::vector<double> legendre_values(int n, double x) {
  std::vector<double> p(n + 1);
  p[0] = 1.0;
  if (n >= 1) p[1] = x;
  for (int k = 2; k <= n; ++k) p[k] = ((2.0 * k - 1.0) * x * p[k - 1] - (k - 1.0) * p[k - 2]) / k;
  return p;
}

double legendre_series(const std::vector<double>& c, double x) {
  if (c.empty()) return 0.0;
  const auto p = legendre_values(static_cast<int>(c.size()) - 1, x);
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * p[k];
  return s;
}

double legendre_series_derivative(const std::vector<double>& c, double x) {
  if (c.size() < 2) return 0.0;
  const int n = static_cast<int>(c.size()) - 1;
  // P'_k via P'_{k+1} = P'_{k-1} + (2k+1) P_k
  const auto p = legendre_values(n, x);
  std::vector<double> dp(n + 1, 0.0);
  if (n >= 1) dp[1] = 1.0;
  for (int k = 1; k < n; ++k) dp[k + 1] = dp[k - 1] + (2.0 * k + 1.0) * p[k];
  double s = 0.0;
  for (int k = 1; k <= n; ++k) s += c[k] * dp[k];
  return s;
}

}  // namespace soh
