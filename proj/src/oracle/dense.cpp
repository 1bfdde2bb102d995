#include "thermreg/oracle/dense.hpp"

#include "thermreg/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace thermreg::oracle {

using C = std::complex<double>;

DenseBasis::DenseBasis(int d_, long K_) : d(d_), K(K_) {
  // Every box point with |n|_1 <= K, then sorted by shell and descending lexicographic order.
  std::vector<int> n(d, 0);
  while (true) {
    long s = 0;
    for (int v : n) s += v;
    if (s <= K) index.push_back(n);
    int a = d - 1;
    while (a >= 0 && ++n[a] > K) n[a--] = 0;
    if (a < 0) break;
  }
  std::sort(index.begin(), index.end(), [](const std::vector<int>& a, const std::vector<int>& b) {
    long sa = 0, sb = 0;
    for (int v : a) sa += v;
    for (int v : b) sb += v;
    if (sa != sb) return sa < sb;
    return a > b;
  });
  for (long r = 0; r < size(); ++r) row[index[r]] = r;
}

long DenseBasis::shell(long r) const {
  long s = 0;
  for (int v : index[r]) s += v;
  return s;
}

long DenseBasis::find(const std::vector<int>& n) const {
  const auto it = row.find(n);
  return it == row.end() ? -1 : it->second;
}

namespace {

// a_axis^dagger on the truncated space: <n + e|a^dagger|n> = sqrt(n_axis + 1).
Eigen::MatrixXd raising(const DenseBasis& basis, int axis) {
  const long n = basis.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (long r = 0; r < n; ++r) {
    std::vector<int> up = basis.index[r];
    up[axis] += 1;
    const long c = basis.find(up);
    if (c >= 0) a(c, r) = std::sqrt(static_cast<double>(up[axis]));
  }
  return a;
}

}  // namespace

DenseOperator dense_position(const DenseBasis& basis, double hbar, int axis) {
  const Eigen::MatrixXd ad = raising(basis, axis);
  DenseOperator op;
  op.dim = basis.size();
  op.entries = (std::sqrt(hbar / 2.0) * (ad + ad.transpose())).cast<C>();
  return op;
}

DenseOperator dense_momentum(const DenseBasis& basis, double hbar, int axis) {
  const Eigen::MatrixXd ad = raising(basis, axis);
  DenseOperator op;
  op.dim = basis.size();
  op.entries = C(0.0, std::sqrt(hbar / 2.0)) * (ad - ad.transpose()).cast<C>();
  return op;
}

Eigen::MatrixXd dense_momentum_squared(int d, long K, double hbar) {
  const DenseBasis big(d, K + 2);
  const DenseBasis small(d, K);
  Eigen::MatrixXcd p2 = Eigen::MatrixXcd::Zero(big.size(), big.size());
  for (int axis = 0; axis < d; ++axis) {
    const Eigen::MatrixXcd p = dense_momentum(big, hbar, axis).entries;
    p2 += p * p;
  }
  Eigen::MatrixXd out(small.size(), small.size());
  for (long i = 0; i < small.size(); ++i)
    for (long j = 0; j < small.size(); ++j)
      out(i, j) = p2(big.find(small.index[i]), big.find(small.index[j])).real();
  return out;
}

Eigen::MatrixXcd dense_hamiltonian(const DenseBasis& basis, double hbar) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(basis.size(), basis.size());
  for (int axis = 0; axis < basis.d; ++axis) {
    const Eigen::MatrixXcd x = dense_position(basis, hbar, axis).entries;
    const Eigen::MatrixXcd p = dense_momentum(basis, hbar, axis).entries;
    h += 0.5 * (x * x + p * p);
  }
  return h;
}

DenseOperator dense_diagonal(const std::vector<double>& values, const DenseBasis& basis) {
  DenseOperator op;
  op.dim = basis.size();
  op.entries = Eigen::MatrixXcd::Zero(op.dim, op.dim);
  for (long r = 0; r < op.dim; ++r) op.entries(r, r) = values.at(basis.shell(r));
  return op;
}

DenseOperator dense_state(const OccupationProfile& profile, long ceiling) {
  const DenseBasis basis(profile.params.d, profile.K());
  if (basis.size() > ceiling) throw DenseCeilingExceeded(basis.size(), ceiling);
  return dense_diagonal(std::vector<double>(profile.density.data(), profile.density.data() + profile.density.size()),
                        basis);
}

DenseOperator dense_gradient(const DenseOperator& a, const DenseBasis& basis, double hbar, Direction direction) {
  DenseOperator out;
  out.dim = a.dim;
  if (direction.kind == GradientKind::position) {
    const Eigen::MatrixXcd p = dense_momentum(basis, hbar, direction.axis).entries;
    out.entries = C(0.0, 1.0 / hbar) * (p * a.entries - a.entries * p);
  } else {
    const Eigen::MatrixXcd x = dense_position(basis, hbar, direction.axis).entries;
    out.entries = C(0.0, -1.0 / hbar) * (x * a.entries - a.entries * x);
  }
  return out;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues();
}

double schatten(const Eigen::VectorXd& sigma, double h, double dim, double p) {
  if (std::isinf(p)) return sigma.size() ? sigma.maxCoeff() : 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) s += std::pow(sigma(i), p);
  return std::pow(h, dim / p) * std::pow(s, 1.0 / p);
}

Eigen::MatrixXd dense_weight(int d, long K, double hbar, int n) {
  const Eigen::MatrixXd p2 = dense_momentum_squared(d, K, hbar);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(p2.rows(), p2.cols());
  if (n == 0) return m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p2);
  const Eigen::VectorXd f = eig.eigenvalues().cwiseMax(0.0).array().pow(0.5 * n).matrix();
  return m + eig.eigenvectors() * f.asDiagonal() * eig.eigenvectors().transpose();
}

double dense_sobolev(const std::vector<double>& values, int d, long K, double hbar, int n, double p, double dim) {
  const DenseBasis basis(d, K);
  const double h = 2.0 * std::numbers::pi * hbar;
  const Eigen::MatrixXcd m = dense_weight(d, K, hbar, n).cast<C>();
  const DenseOperator a = dense_diagonal(values, basis);
  std::vector<double> parts{schatten(singular_values(a.entries * m), h, dim, p)};
  for (GradientKind kind : {GradientKind::position, GradientKind::velocity})
    for (int axis = 0; axis < d; ++axis)
      parts.push_back(schatten(singular_values(dense_gradient(a, basis, hbar, {kind, axis}).entries * m), h, dim, p));
  if (std::isinf(p)) return *std::max_element(parts.begin(), parts.end());
  double s = 0.0;
  for (double v : parts) s += std::pow(v, p);
  return std::pow(s, 1.0 / p);
}

}  // namespace thermreg::oracle
