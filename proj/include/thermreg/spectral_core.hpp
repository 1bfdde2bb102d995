#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <map>
#include <vector>

namespace thermreg {

/// Real symmetric tridiagonal matrix stored as its diagonal and first off-diagonal.
template <typename Scalar>
struct SymTridiagonal {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> diag;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> offdiag;  // size() == diag.size() - 1 (or 0)

  Eigen::Index size() const { return diag.size(); }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense() const {
    const Eigen::Index n = size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    m.diagonal() = diag;
    for (Eigen::Index i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = offdiag(i);
    return m;
  }
};

using SymTridiagonalXd = SymTridiagonal<double>;

/// Oscillator shells of H = (|p|^2 + |x|^2)/2 in d dimensions, truncated at total
/// quantum number K. Shell k has energy (k + d/2) hbar and multiplicity C(k+d-1, d-1).
struct ShellTable {
  int d = 1;
  double hbar = 1.0;
  long K = 0;
  Eigen::VectorXd energies;
  Eigen::VectorXd mults;  // integer counts, held in double (exact below 2^53)

  long shell_count() const { return K + 1; }
  /// Dimension of the truncated Hilbert space, C(K+d, d).
  double dimension() const;
  double h() const;
};

ShellTable build_shell_table(int d, double hbar, long K);

/// Number of states with total quantum number k in `dim` dimensions. By convention
/// dim = 0 has a single (empty) multi-index at k = 0.
double shell_multiplicity(long k, int dim);

/// Single-direction ladder matrix elements <j|x|j+1> = sqrt(hbar (j+1)/2).
/// |<j|p|j+1>| has the same value.
struct LadderElements {
  double hbar = 1.0;
  double offdiag(long j) const;
};

/// Position operator x restricted to levels 0..K (one direction).
SymTridiagonalXd position_tridiagonal(long K, double hbar);

/// p^2 restricted to levels 0..K, split by parity of the level index.
struct ParityBlocks {
  SymTridiagonalXd even;  // levels 0, 2, 4, ...
  SymTridiagonalXd odd;   // levels 1, 3, 5, ...
};

ParityBlocks momentum_squared_parity_blocks(long K, double hbar);

/// Graded-lexicographic enumeration of multi-indices {n in N^d : |n|_1 <= K}.
/// Shell k occupies a contiguous row range; inside a shell, larger n_1 comes first.
class SimplexBasis {
 public:
  SimplexBasis(int d, long K);

  int d() const { return d_; }
  long K() const { return K_; }
  std::size_t size() const { return indices_.size(); }
  const std::vector<int>& multi_index(std::size_t row) const { return indices_[row]; }
  long shell(std::size_t row) const { return shells_[row]; }
  /// Row of a multi-index, or -1 if outside the truncated simplex.
  long row_of(const std::vector<int>& n) const;

 private:
  int d_;
  long K_;
  std::vector<std::vector<int>> indices_;
  std::vector<long> shells_;
  std::map<std::vector<int>, long> rows_;
};

}  // namespace thermreg
