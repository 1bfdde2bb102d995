#pragma once

#include "thermreg/errors.hpp"

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace thermreg {

template <typename Scalar>
struct QuadratureRule {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
};

/// Gauss-Legendre rule on [-1, 1]; Newton iteration on the three-term recurrence.
template <typename Scalar = double>
QuadratureRule<Scalar> gauss_legendre(int order) {
  if (order < 1) throw InvalidArgument("gauss_legendre: order must be >= 1");
  using std::abs;
  using std::cos;
  QuadratureRule<Scalar> rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    Scalar z = cos(std::numbers::pi_v<Scalar> * (Scalar(i) + Scalar(0.75)) / (Scalar(order) + Scalar(0.5)));
    Scalar pp = 0;
    for (int it = 0; it < 100; ++it) {
      Scalar p1 = 1, p2 = 0;
      for (int j = 1; j <= order; ++j) {
        const Scalar p3 = p2;
        p2 = p1;
        p1 = ((Scalar(2 * j - 1)) * z * p2 - Scalar(j - 1) * p3) / Scalar(j);
      }
      pp = Scalar(order) * (z * p1 - p2) / (z * z - Scalar(1));
      const Scalar dz = p1 / pp;
      z -= dz;
      if (abs(dz) <= Scalar(4) * eps) break;
    }
    rule.nodes(i) = -z;
    rule.nodes(order - 1 - i) = z;
    const Scalar w = Scalar(2) / ((Scalar(1) - z * z) * pp * pp);
    rule.weights(i) = w;
    rule.weights(order - 1 - i) = w;
  }
  return rule;
}

/// Gauss-Hermite rule for the weight e^{-x^2} on the real line (orthonormal-recurrence Newton).
template <typename Scalar = double>
QuadratureRule<Scalar> gauss_hermite(int order) {
  if (order < 1) throw InvalidArgument("gauss_hermite: order must be >= 1");
  using std::abs;
  using std::sqrt;
  QuadratureRule<Scalar> rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar pim4 = Scalar(1) / std::pow(std::numbers::pi_v<Scalar>, Scalar(0.25));
  const int m = (order + 1) / 2;
  const Scalar n = Scalar(order);
  Scalar z = 0;
  for (int i = 0; i < m; ++i) {
    if (i == 0)
      z = sqrt(Scalar(2) * n + Scalar(1)) - Scalar(1.85575) * std::pow(Scalar(2) * n + Scalar(1), Scalar(-1.0 / 6.0));
    else if (i == 1)
      z -= Scalar(1.14) * std::pow(n, Scalar(0.426)) / z;
    else if (i == 2)
      z = Scalar(1.86) * z - Scalar(0.86) * rule.nodes(0);
    else if (i == 3)
      z = Scalar(1.91) * z - Scalar(0.91) * rule.nodes(1);
    else
      z = Scalar(2) * z - rule.nodes(i - 2);
    Scalar pp = 0;
    int it = 0;
    for (; it < 200; ++it) {
      Scalar p1 = pim4, p2 = 0;
      for (int j = 0; j < order; ++j) {
        const Scalar p3 = p2;
        p2 = p1;
        p1 = z * sqrt(Scalar(2) / Scalar(j + 1)) * p2 - sqrt(Scalar(j) / Scalar(j + 1)) * p3;
      }
      pp = sqrt(Scalar(2) * n) * p2;
      const Scalar dz = p1 / pp;
      z -= dz;
      if (abs(dz) <= Scalar(8) * eps * std::max(Scalar(1), abs(z))) break;
    }
    if (it == 200) throw ConvergenceError("gauss_hermite: Newton iteration failed");
    rule.nodes(i) = z;
    rule.nodes(order - 1 - i) = -z;
    rule.weights(i) = Scalar(2) / (pp * pp);
    rule.weights(order - 1 - i) = rule.weights(i);
  }
  // nodes were generated in descending order
  rule.nodes.reverseInPlace();
  rule.weights.reverseInPlace();
  return rule;
}

/// Fixed-order Gauss-Legendre on [a, b] split into `panels` equal panels.
template <typename Scalar, typename F>
Scalar composite_gauss_legendre(F&& f, Scalar a, Scalar b, int panels, const QuadratureRule<Scalar>& rule) {
  Scalar total = 0;
  const Scalar width = (b - a) / Scalar(panels);
  for (int k = 0; k < panels; ++k) {
    const Scalar lo = a + width * Scalar(k);
    const Scalar half = width / 2, mid = lo + half;
    Scalar s = 0;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) s += rule.weights(i) * f(mid + half * rule.nodes(i));
    total += half * s;
  }
  return total;
}

struct AdaptiveResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
};

/// Composite order-20 Gauss-Legendre on [a, b]; the panel count doubles until two
/// successive results agree to rel_tol (or abs_tol).
template <typename F>
AdaptiveResult integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 0.0,
                                  int max_panels = 1 << 16) {
  static const QuadratureRule<double> rule = gauss_legendre<double>(20);
  double prev = composite_gauss_legendre<double>(f, a, b, 1, rule);
  for (int panels = 2; panels <= max_panels; panels *= 2) {
    const double cur = composite_gauss_legendre<double>(f, a, b, panels, rule);
    const double err = std::abs(cur - prev);
    if (err <= std::max(rel_tol * std::abs(cur), abs_tol)) return {cur, err, panels};
    prev = cur;
  }
  throw ConvergenceError("integrate_adaptive: tolerance not met");
}

}  // namespace thermreg
