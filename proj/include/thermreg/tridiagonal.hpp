#pragma once

// Eigenvalue routines for real symmetric tridiagonal matrices: implicit-shift QL
// (optionally accumulating eigenvectors) and Sturm-sequence bisection.

#include "thermreg/errors.hpp"
#include "thermreg/spectral_core.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace thermreg {

template <typename Scalar>
struct TridiagonalEigen {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;                    // ascending
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;      // columns; empty if not requested
};

namespace detail {

template <typename Scalar>
void implicit_ql(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& d, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& e,
                 Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>* z) {
  using std::abs;
  using std::hypot;
  const long n = d.size();
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar tiny = std::numeric_limits<Scalar>::min();
  constexpr int max_iter = 60;
  // Couplings below eps ||T|| are dropped: the eigenvalues move by less than the normwise
  // backward error QL commits anyway, and strongly graded inputs otherwise stall in denormals.
  Scalar norm = 0;
  for (long i = 0; i < n; ++i) norm = std::max(norm, abs(d(i)) + (i + 1 < n ? abs(e(i)) : Scalar(0)));
  const Scalar floor = eps * norm;

  for (long l = 0; l < n; ++l) {
    int iter = 0;
    long m;
    do {
      for (m = l; m < n - 1; ++m) {
        const Scalar dd = abs(d(m)) + abs(d(m + 1));
        if (abs(e(m)) <= eps * dd || abs(e(m)) <= floor || abs(e(m)) < tiny) break;
      }
      if (m != l) {
        if (iter++ == max_iter)
          throw ConvergenceError("tridiagonal QL: no convergence for eigenvalue " + std::to_string(l));
        Scalar g = (d(l + 1) - d(l)) / (Scalar(2) * e(l));
        Scalar r = hypot(g, Scalar(1));
        g = d(m) - d(l) + e(l) / (g + (g >= 0 ? abs(r) : -abs(r)));
        Scalar s = 1, c = 1, p = 0;
        long i;
        bool underflow = false;
        for (i = m - 1; i >= l; --i) {
          Scalar f = s * e(i);
          const Scalar b = c * e(i);
          r = hypot(f, g);
          e(i + 1) = r;
          if (r == Scalar(0)) {
            d(i + 1) -= p;
            e(m) = 0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d(i + 1) - p;
          r = (d(i) - g) * s + Scalar(2) * c * b;
          p = s * r;
          d(i + 1) = g + p;
          g = c * r - b;
          if (z) {
            for (long k = 0; k < z->rows(); ++k) {
              f = (*z)(k, i + 1);
              (*z)(k, i + 1) = s * (*z)(k, i) + c * f;
              (*z)(k, i) = c * (*z)(k, i) - s * f;
            }
          }
        }
        if (underflow) continue;
        d(l) -= p;
        e(l) = g;
        e(m) = 0;
      }
    } while (m != l);
  }
}

}  // namespace detail

/// Eigenvalues (ascending) of a symmetric tridiagonal matrix by implicit-shift QL.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> tridiagonal_eigenvalues(const SymTridiagonal<Scalar>& t) {
  const long n = t.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> d = t.diag;
  if (n <= 1) return d;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> e = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
  e.head(n - 1) = t.offdiag;
  detail::implicit_ql<Scalar>(d, e, nullptr);
  std::sort(d.data(), d.data() + n);
  return d;
}

/// Full eigendecomposition; eigenvector k is column k and pairs with values(k).
template <typename Scalar>
TridiagonalEigen<Scalar> tridiagonal_eigen(const SymTridiagonal<Scalar>& t) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const long n = t.size();
  Vec d = t.diag;
  Mat z = Mat::Identity(n, n);
  if (n > 1) {
    Vec e = Vec::Zero(n);
    e.head(n - 1) = t.offdiag;
    detail::implicit_ql<Scalar>(d, e, &z);
  }
  std::vector<long> order(n);
  std::iota(order.begin(), order.end(), 0L);
  std::sort(order.begin(), order.end(), [&](long a, long b) { return d(a) < d(b); });
  TridiagonalEigen<Scalar> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (long k = 0; k < n; ++k) {
    out.values(k) = d(order[k]);
    out.vectors.col(k) = z.col(order[k]);
  }
  return out;
}

/// Number of eigenvalues strictly below x (Sturm sequence / LDL^T inertia count).
template <typename Scalar>
long sturm_count(const SymTridiagonal<Scalar>& t, Scalar x) {
  using std::abs;
  const long n = t.size();
  if (n == 0) return 0;
  Scalar max_e2 = 1;
  for (long i = 0; i + 1 < n; ++i) max_e2 = std::max(max_e2, t.offdiag(i) * t.offdiag(i));
  const Scalar pivmin = std::numeric_limits<Scalar>::min() * max_e2;
  long count = 0;
  Scalar q = t.diag(0) - x;
  if (abs(q) < pivmin) q = -pivmin;
  if (q < 0) ++count;
  for (long i = 1; i < n; ++i) {
    q = t.diag(i) - x - t.offdiag(i - 1) * t.offdiag(i - 1) / q;
    if (abs(q) < pivmin) q = -pivmin;
    if (q < 0) ++count;
  }
  return count;
}

/// Gershgorin radius bound: every eigenvalue lies in [-bound, bound].
template <typename Scalar>
Scalar gershgorin_bound(const SymTridiagonal<Scalar>& t) {
  using std::abs;
  const long n = t.size();
  Scalar bound = 0;
  for (long i = 0; i < n; ++i) {
    Scalar row = abs(t.diag(i));
    if (i > 0) row += abs(t.offdiag(i - 1));
    if (i + 1 < n) row += abs(t.offdiag(i));
    bound = std::max(bound, row);
  }
  return bound;
}

/// Largest eigenvalue by bisection on the Sturm count.
template <typename Scalar>
Scalar largest_eigenvalue(const SymTridiagonal<Scalar>& t) {
  const long n = t.size();
  if (n == 0) throw InvalidArgument("largest_eigenvalue: empty matrix");
  const Scalar g = gershgorin_bound(t);
  if (g == Scalar(0)) return 0;
  Scalar lo = -g * Scalar(1.0001), hi = g * Scalar(1.0001);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  // invariant: count(<lo) < n, count(<hi) == n
  for (int it = 0; it < 200 && hi - lo > Scalar(2) * eps * std::max(std::abs(lo), std::abs(hi)); ++it) {
    const Scalar mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(t, mid) == n)
      hi = mid;
    else
      lo = mid;
  }
  return lo + (hi - lo) / 2;
}

template <typename Scalar>
Scalar smallest_eigenvalue(const SymTridiagonal<Scalar>& t) {
  SymTridiagonal<Scalar> neg{-t.diag, t.offdiag};
  return -largest_eigenvalue(neg);
}

/// Spectral radius max |lambda|.
template <typename Scalar>
Scalar spectral_radius(const SymTridiagonal<Scalar>& t) {
  using std::abs;
  return std::max(abs(largest_eigenvalue(t)), abs(smallest_eigenvalue(t)));
}

}  // namespace thermreg
