#pragma once

// Special functions and fixed-order Gauss-Legendre rules shared by the
// Fock-space and quadrature code.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qregion {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Newton iteration on P_n from the Tricomi initial guess. Nodes are returned
/// in increasing order.
inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
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
    // one more derivative evaluation at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

/// Gauss-Legendre rule mapped to [a, b].
inline GaussRule gauss_legendre(int n, double a, double b) {
  GaussRule rule = gauss_legendre(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

/// Normalized Hermite functions psi_0..psi_{count-1} at x,
/// psi_n(x) = pi^{-1/4} (2^n n!)^{-1/2} e^{-x^2/2} H_n(x).
inline Eigen::VectorXd hermite_functions(double x, int count) {
  Eigen::VectorXd psi(count);
  if (count == 0) return psi;
  psi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (count > 1) psi[1] = std::sqrt(2.0) * x * psi[0];
  for (int n = 1; n + 1 < count; ++n) {
    psi[n + 1] = std::sqrt(2.0 / (n + 1)) * x * psi[n] - std::sqrt(double(n) / (n + 1)) * psi[n - 1];
  }
  return psi;
}

/// e^{-x/2} L_n(x) for n = 0..count-1 (ordinary Laguerre polynomials). The
/// damping factor keeps every value bounded by one in magnitude.
inline Eigen::VectorXd damped_laguerre(double x, int count) {
  Eigen::VectorXd l(count);
  if (count == 0) return l;
  l[0] = std::exp(-0.5 * x);
  if (count > 1) l[1] = (1.0 - x) * l[0];
  for (int n = 1; n + 1 < count; ++n) {
    l[n + 1] = ((2.0 * n + 1.0 - x) * l[n] - n * l[n - 1]) / (n + 1.0);
  }
  return l;
}

}  // namespace qregion
