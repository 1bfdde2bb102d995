#include "thermreg/spectral_core.hpp"

#include "thermreg/errors.hpp"
#include "thermreg/numeric.hpp"

#include <cmath>
#include <string>

namespace thermreg {

double ShellTable::dimension() const { return binomial(K + d, d); }

double ShellTable::h() const { return planck(hbar); }

double shell_multiplicity(long k, int dim) {
  if (k < 0) return 0.0;
  if (dim == 0) return k == 0 ? 1.0 : 0.0;
  return binomial(k + dim - 1, dim - 1);
}

ShellTable build_shell_table(int d, double hbar, long K) {
  if (d < 1) throw InvalidArgument("build_shell_table: dimension must be positive, got " + std::to_string(d));
  if (!std::isfinite(hbar) || hbar <= 0.0) throw InvalidArgument("build_shell_table: hbar must be finite and positive");
  if (K < 0) throw InvalidArgument("build_shell_table: cutoff must be nonnegative");

  ShellTable t;
  t.d = d;
  t.hbar = hbar;
  t.K = K;
  t.energies.resize(K + 1);
  t.mults.resize(K + 1);
  const double half_d = 0.5 * d;
  // g_{k,d} = g_{k-1,d} * (k + d - 1) / k
  double g = 1.0;
  for (long k = 0; k <= K; ++k) {
    if (k > 0) g = std::round(g * static_cast<double>(k + d - 1) / static_cast<double>(k));
    t.energies(k) = (static_cast<double>(k) + half_d) * hbar;
    t.mults(k) = g;
  }
  return t;
}

double LadderElements::offdiag(long j) const { return std::sqrt(hbar * static_cast<double>(j + 1) / 2.0); }

SymTridiagonalXd position_tridiagonal(long K, double hbar) {
  if (K < 0) throw InvalidArgument("position_tridiagonal: cutoff must be nonnegative");
  const LadderElements ladder{hbar};
  SymTridiagonalXd x;
  x.diag = Eigen::VectorXd::Zero(K + 1);
  x.offdiag.resize(K);
  for (long j = 0; j < K; ++j) x.offdiag(j) = ladder.offdiag(j);
  return x;
}

ParityBlocks momentum_squared_parity_blocks(long K, double hbar) {
  if (K < 0) throw InvalidArgument("momentum_squared_parity_blocks: cutoff must be nonnegative");
  if (!std::isfinite(hbar) || hbar <= 0.0) throw InvalidArgument("momentum_squared_parity_blocks: bad hbar");

  auto block = [&](long first) {
    SymTridiagonalXd b;
    const long n = first > K ? 0 : (K - first) / 2 + 1;
    b.diag.resize(n);
    b.offdiag.resize(n > 0 ? n - 1 : 0);
    for (long i = 0; i < n; ++i) {
      const double j = static_cast<double>(first + 2 * i);
      b.diag(i) = hbar * (j + 0.5);
      if (i + 1 < n) b.offdiag(i) = -0.5 * hbar * std::sqrt((j + 1.0) * (j + 2.0));
    }
    return b;
  };
  return ParityBlocks{block(0), block(1)};
}

namespace {

void enumerate_shell(int d, long k, int pos, std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (pos == d - 1) {
    current[pos] = static_cast<int>(k);
    out.push_back(current);
    return;
  }
  for (long first = k; first >= 0; --first) {
    current[pos] = static_cast<int>(first);
    enumerate_shell(d, k - first, pos + 1, current, out);
  }
}

}  // namespace

SimplexBasis::SimplexBasis(int d, long K) : d_(d), K_(K) {
  if (d < 1 || K < 0) throw InvalidArgument("SimplexBasis: need d >= 1 and K >= 0");
  std::vector<int> current(d, 0);
  for (long k = 0; k <= K; ++k) {
    const std::size_t before = indices_.size();
    enumerate_shell(d, k, 0, current, indices_);
    shells_.insert(shells_.end(), indices_.size() - before, k);
  }
  for (std::size_t row = 0; row < indices_.size(); ++row) rows_.emplace(indices_[row], static_cast<long>(row));
}

long SimplexBasis::row_of(const std::vector<int>& n) const {
  auto it = rows_.find(n);
  return it == rows_.end() ? -1 : it->second;
}

}  // namespace thermreg
