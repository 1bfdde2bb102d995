#pragma once

// Dense reference implementations for tests. Nothing in the library calls this.

#include "thermreg/gradients.hpp"
#include "thermreg/thermal_states.hpp"

#include <Eigen/Core>

#include <map>
#include <vector>

namespace thermreg::oracle {

/// Multi-indices {n : |n|_1 <= K} in graded-lexicographic order, built independently
/// of SimplexBasis by filtering the full box.
struct DenseBasis {
  int d = 1;
  long K = 0;
  std::vector<std::vector<int>> index;
  std::map<std::vector<int>, long> row;

  DenseBasis(int d, long K);
  long size() const { return static_cast<long>(index.size()); }
  long shell(long r) const;
  long find(const std::vector<int>& n) const;
};

struct DenseOperator {
  long dim = 0;
  Eigen::MatrixXcd entries;
};

/// x_axis and p_axis on the truncated space, from the ladder operators.
DenseOperator dense_position(const DenseBasis& basis, double hbar, int axis);
DenseOperator dense_momentum(const DenseBasis& basis, double hbar, int axis);

/// sum_i p_i^2 without truncation artifacts (squared on K + 2 levels, then restricted).
Eigen::MatrixXd dense_momentum_squared(int d, long K, double hbar);

/// (x^2 + p^2) / 2 formed by products of the truncated x and p.
Eigen::MatrixXcd dense_hamiltonian(const DenseBasis& basis, double hbar);

DenseOperator dense_state(const OccupationProfile& profile, long ceiling = 4000);
DenseOperator dense_diagonal(const std::vector<double>& shell_values, const DenseBasis& basis);

/// [grad, A] = (i/hbar)[p, A] or [x/(i hbar), A] by explicit matrix products.
DenseOperator dense_gradient(const DenseOperator& a, const DenseBasis& basis, double hbar, Direction direction);

/// Singular values (descending) by Jacobi SVD.
Eigen::VectorXd singular_values(const Eigen::MatrixXcd& a);

/// h^{D/p} (sum sigma^p)^{1/p}.
double schatten(const Eigen::VectorXd& sigma, double h, double dim, double p);

/// 1 + |p|^n (n = 0 gives identity) from a dense eigendecomposition of sum p_i^2.
Eigen::MatrixXd dense_weight(int d, long K, double hbar, int n);

/// W^{1,p}(m) norm of the shell-diagonal operator, every part formed densely.
double dense_sobolev(const std::vector<double>& shell_values, int d, long K, double hbar, int n, double p,
                     double dim);

}  // namespace thermreg::oracle
