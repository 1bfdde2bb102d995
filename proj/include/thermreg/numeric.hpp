#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace thermreg {

/// Compensated (Neumaier) accumulator. Shell sums run over up to ~10^5 terms and
/// the trace constraint is checked at 1e-12, so plain summation is not enough.
template <typename Scalar = double>
class CompensatedSum {
 public:
  void add(Scalar x) {
    const Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(Scalar x) {
    add(x);
    return *this;
  }
  Scalar value() const { return sum_ + comp_; }

 private:
  Scalar sum_{0};
  Scalar comp_{0};
};

/// C(n, k) in floating point; exact while the result stays below 2^53.
inline double binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (long i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

/// Planck constant h = 2*pi*hbar.
inline double planck(double hbar) { return 2.0 * std::numbers::pi * hbar; }

/// log of (e^a - e^b)/(a - b)-type logarithmic mean of two positive numbers given by their logs:
/// L(a, b) = (a - b) / (ln a - ln b), with L(a, a) = a.
inline double logarithmic_mean_from_logs(double log_a, double log_b) {
  const double t = log_a - log_b;
  if (t == 0.0) return std::exp(log_a);
  // a - b = a (1 - e^{-t}) = -a expm1(-t)
  return std::exp(log_a) * (-std::expm1(-t)) / t;
}

inline double logarithmic_mean(double a, double b) {
  if (a == b) return a;
  if (a <= 0.0 || b <= 0.0) return 0.0;
  return logarithmic_mean_from_logs(std::log(a), std::log(b));
}

}  // namespace thermreg
