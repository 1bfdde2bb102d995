#include "thermreg/norms.hpp"

#include "thermreg/errors.hpp"
#include "thermreg/numeric.hpp"
#include "thermreg/tridiagonal.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace thermreg {

namespace {

void check_p(double p) {
  if (!(p >= 1.0)) throw InvalidArgument("Schatten index must satisfy p >= 1");
}

void check_ceiling(double dim, long ceiling) {
  if (dim > static_cast<double>(ceiling)) throw DenseCeilingExceeded(static_cast<long>(dim), ceiling);
}

double prefactor(double h, double dim, double p) { return std::isinf(p) ? 1.0 : std::pow(h, dim / p); }

}  // namespace

SingularSpectrum make_spectrum(std::vector<double> values, std::vector<double> weights, double h,
                               double prefactor_dim) {
  if (values.size() != weights.size()) throw InvalidArgument("make_spectrum: size mismatch");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (double& v : values) v = std::abs(v);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  SingularSpectrum s;
  s.values.resize(values.size());
  s.weights.resize(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    s.values(i) = values[order[i]];
    s.weights(i) = weights[order[i]];
  }
  s.h = h;
  s.prefactor_dim = prefactor_dim;
  return s;
}

double schatten_norm(const SingularSpectrum& spec, double p) {
  check_p(p);
  const double top = spec.max();
  if (std::isinf(p)) return top;
  if (top == 0.0) return 0.0;
  CompensatedSum<> s;
  for (Eigen::Index i = 0; i < spec.values.size(); ++i) {
    if (spec.values(i) == 0.0) continue;
    s += spec.weights(i) * std::pow(spec.values(i) / top, p);
  }
  return prefactor(spec.h, spec.prefactor_dim, p) * top * std::pow(s.value(), 1.0 / p);
}

SingularSpectrum diagonal_spectrum(std::span<const double> values, const ShellTable& shells, NormConvention conv) {
  if (static_cast<long>(values.size()) != shells.K + 1) throw InvalidArgument("diagonal_spectrum: size mismatch");
  std::vector<double> w(shells.mults.data(), shells.mults.data() + shells.mults.size());
  return make_spectrum(std::vector<double>(values.begin(), values.end()), std::move(w), shells.h(),
                       conv.prefactor_dim(shells.d));
}

double diagonal_schatten_norm(std::span<const double> values, const ShellTable& shells, double p,
                              NormConvention conv) {
  check_p(p);
  if (static_cast<long>(values.size()) != shells.K + 1)
    throw InvalidArgument("diagonal_schatten_norm: size mismatch");
  double top = 0.0;
  for (double v : values) top = std::max(top, std::abs(v));
  if (std::isinf(p) || top == 0.0) return top;
  CompensatedSum<> s;
  for (long k = 0; k <= shells.K; ++k) s += shells.mults(k) * std::pow(std::abs(values[k]) / top, p);
  return prefactor(shells.h(), conv.prefactor_dim(shells.d), p) * top * std::pow(s.value(), 1.0 / p);
}

SingularSpectrum singular_spectrum(const GradientBlocks& gb, NormConvention conv) {
  std::vector<double> values, weights;
  for (long r = 0; r < gb.block_count(); ++r) {
    const double mult = gb.block_multiplicity(r);
    if (mult == 0.0) continue;
    Eigen::VectorXd ev;
    try {
      ev = tridiagonal_eigenvalues(gb.block(r));
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("singular_spectrum: block " + std::to_string(r) + ": " + e.what());
    }
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      values.push_back(std::abs(ev(i)));
      weights.push_back(mult);
    }
  }
  return make_spectrum(std::move(values), std::move(weights), planck(gb.hbar), conv.prefactor_dim(gb.d));
}

double block_schatten_norm(const GradientBlocks& gb, double p, NormConvention conv) {
  check_p(p);
  const double h = planck(gb.hbar);
  const double dim = conv.prefactor_dim(gb.d);
  const double scale = gb.shell_coeff.size() ? gb.shell_coeff.cwiseAbs().maxCoeff() : 0.0;
  if (scale == 0.0) return 0.0;

  if (p == 2.0) {
    CompensatedSum<> s;
    for (long k = 0; k < gb.K; ++k) {
      const double f = gb.shell_coeff(k) / scale;
      s += binomial(k + gb.d, gb.d) * f * f;
    }
    return prefactor(h, dim, p) * scale * std::sqrt(gb.hbar * s.value());
  }

  if (p == 4.0) {
    // entries scaled by 1/scale; tr B^4 = sum_i (c_{i-1}^2 + c_i^2)^2 + 2 sum_i c_i^2 c_{i+1}^2
    CompensatedSum<> total;
    for (long r = 0; r < gb.block_count(); ++r) {
      const double mult = gb.block_multiplicity(r);
      const long n = gb.block_size(r);
      if (mult == 0.0 || n < 2) continue;
      double s = 0.0, prev2 = 0.0;
      for (long i = 0; i < n; ++i) {
        const double c2 = i + 1 < n ? std::pow(gb.entry(r, i) / scale, 2) : 0.0;
        s += (prev2 + c2) * (prev2 + c2) + 2.0 * prev2 * c2;
        prev2 = c2;
      }
      total += mult * s;
    }
    return prefactor(h, dim, p) * scale * std::pow(total.value(), 0.25);
  }

  if (std::isinf(p)) {
    // Zero-diagonal tridiagonal blocks have spectra symmetric about 0, so the spectral
    // radius is the largest eigenvalue. A block is refined only if its Sturm count
    // shows an eigenvalue above the current maximum.
    double best = 0.0;
    for (long r = 0; r < gb.block_count(); ++r) {
      if (gb.block_multiplicity(r) == 0.0 || gb.block_size(r) < 2) continue;
      SymTridiagonalXd b = gb.block(r);
      b.offdiag /= scale;
      if (best > 0.0) {
        if (gershgorin_bound(b) <= best) continue;
        if (sturm_count(b, best) == b.size()) continue;
      }
      best = std::max(best, largest_eigenvalue(b));
    }
    return scale * best;
  }

  return schatten_norm(singular_spectrum(gb, conv), p);
}

Eigen::MatrixXd momentum_squared_dense(const ShellTable& shells, long dense_ceiling) {
  check_ceiling(shells.dimension(), dense_ceiling);
  const SimplexBasis basis(shells.d, shells.K);
  const long n = static_cast<long>(basis.size());
  const double hbar = shells.hbar;
  Eigen::MatrixXd p2 = Eigen::MatrixXd::Zero(n, n);
  for (long row = 0; row < n; ++row) {
    std::vector<int> idx = basis.multi_index(row);
    for (int axis = 0; axis < shells.d; ++axis) {
      const double j = idx[axis];
      p2(row, row) += hbar * (j + 0.5);
      idx[axis] += 2;
      const long col = basis.row_of(idx);
      idx[axis] -= 2;
      if (col < 0) continue;
      const double v = -0.5 * hbar * std::sqrt((j + 1.0) * (j + 2.0));
      p2(row, col) = v;
      p2(col, row) = v;
    }
  }
  return p2;
}

namespace {

Eigen::MatrixXd weight_base(long n, const WeightSpec& w, const NormConvention& conv) {
  if (w.n < 0) throw InvalidArgument("weight exponent must be nonnegative");
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
  if (w.n == 0 && !conv.zero_weight_is_identity) m *= 2.0;
  return m;
}

void add_function_of_block(Eigen::MatrixXd& out, const SymTridiagonalXd& block, long first, double exponent) {
  if (block.size() == 0) return;
  const TridiagonalEigen<double> eig = tridiagonal_eigen(block);
  const Eigen::VectorXd f = eig.values.cwiseMax(0.0).array().pow(exponent).matrix();
  const Eigen::MatrixXd local = eig.vectors * f.asDiagonal() * eig.vectors.transpose();
  for (long i = 0; i < block.size(); ++i)
    for (long j = 0; j < block.size(); ++j) out(first + 2 * i, first + 2 * j) += local(i, j);
}

}  // namespace

Eigen::MatrixXd momentum_weight(const ShellTable& shells, WeightSpec weight, NormConvention conv,
                                long dense_ceiling) {
  check_ceiling(shells.dimension(), dense_ceiling);
  const long n = static_cast<long>(shells.dimension());
  Eigen::MatrixXd m = weight_base(n, weight, conv);
  if (weight.n == 0) return m;
  const double exponent = 0.5 * weight.n;
  if (shells.d == 1) {
    const ParityBlocks blocks = momentum_squared_parity_blocks(shells.K, shells.hbar);
    add_function_of_block(m, blocks.even, 0, exponent);
    add_function_of_block(m, blocks.odd, 1, exponent);
    return m;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(momentum_squared_dense(shells, dense_ceiling));
  if (eig.info() != Eigen::Success) throw ConvergenceError("momentum_weight: eigensolver failed");
  const Eigen::VectorXd f = eig.eigenvalues().cwiseMax(0.0).array().pow(exponent).matrix();
  m += eig.eigenvectors() * f.asDiagonal() * eig.eigenvectors().transpose();
  return m;
}

Eigen::MatrixXd momentum_weight_banded(const ShellTable& shells, WeightSpec weight, NormConvention conv,
                                       long dense_ceiling) {
  if (weight.n % 2 != 0) throw InvalidArgument("momentum_weight_banded: weight exponent must be even");
  check_ceiling(shells.dimension(), dense_ceiling);
  const long n = static_cast<long>(shells.dimension());
  Eigen::MatrixXd m = weight_base(n, weight, conv);
  if (weight.n == 0) return m;
  const Eigen::MatrixXd p2 = momentum_squared_dense(shells, dense_ceiling);
  Eigen::MatrixXd power = p2;
  for (int k = 1; k < weight.n / 2; ++k) power = power * p2;
  return m + power;
}

Eigen::MatrixXcd dense_gradient(const GradientBlocks& gb, long dense_ceiling) {
  const double dim = binomial(gb.K + gb.d, gb.d);
  check_ceiling(dim, dense_ceiling);
  const SimplexBasis basis(gb.d, gb.K);
  const long n = static_cast<long>(basis.size());
  using C = std::complex<double>;
  const C up = gb.direction.kind == GradientKind::position ? C(1, 0) : C(0, -1);
  const C down = gb.direction.kind == GradientKind::position ? C(1, 0) : C(0, 1);
  const int axis = gb.direction.axis;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (long row = 0; row < n; ++row) {
    std::vector<int> idx = basis.multi_index(row);
    const long j = idx[axis];
    const long r = basis.shell(row) - j;
    idx[axis] += 1;
    const long col = basis.row_of(idx);
    if (col < 0) continue;
    const double c = gb.entry(r, j);
    a(row, col) = up * c;
    a(col, row) = down * c;
  }
  return a;
}

Eigen::MatrixXd dense_shell_diagonal(std::span<const double> values, const ShellTable& shells, long dense_ceiling) {
  check_ceiling(shells.dimension(), dense_ceiling);
  const SimplexBasis basis(shells.d, shells.K);
  Eigen::VectorXd diag(basis.size());
  for (std::size_t row = 0; row < basis.size(); ++row) diag(row) = values[basis.shell(row)];
  return diag.asDiagonal();
}

Eigen::MatrixXcd weighted_operator(const Eigen::MatrixXcd& op, const Eigen::MatrixXd& weight) {
  if (op.cols() != weight.rows()) throw InvalidArgument("weighted_operator: dimension mismatch");
  return op * weight.cast<std::complex<double>>();
}

SingularSpectrum dense_spectrum(const Eigen::MatrixXcd& op, double h, double prefactor_dim) {
  std::vector<double> values;
  if (op.imag().isZero(0.0)) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(op.real());
    const Eigen::VectorXd sv = svd.singularValues();
    values.assign(sv.data(), sv.data() + sv.size());
  } else {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(op);
    const Eigen::VectorXd sv = svd.singularValues();
    values.assign(sv.data(), sv.data() + sv.size());
  }
  std::vector<double> weights(values.size(), 1.0);
  return make_spectrum(std::move(values), std::move(weights), h, prefactor_dim);
}

double sobolev_norm(std::span<const double> parts, double p) {
  check_p(p);
  if (std::isinf(p)) return parts.empty() ? 0.0 : *std::max_element(parts.begin(), parts.end());
  double top = 0.0;
  for (double v : parts) top = std::max(top, v);
  if (top == 0.0) return 0.0;
  double s = 0.0;
  for (double v : parts) s += std::pow(v / top, p);
  return top * std::pow(s, 1.0 / p);
}

SobolevParts sobolev_norm(std::span<const double> values, const ShellTable& shells, WeightSpec weight, double p,
                          NormConvention conv, long dense_ceiling) {
  const Eigen::MatrixXd m = momentum_weight(shells, weight, conv, dense_ceiling);
  const double h = shells.h();
  const double dim = conv.prefactor_dim(shells.d);
  SobolevParts out;
  {
    const Eigen::MatrixXd state = dense_shell_diagonal(values, shells, dense_ceiling);
    out.state = schatten_norm(dense_spectrum((state * m).cast<std::complex<double>>(), h, dim), p);
  }
  std::vector<double> parts{out.state};
  for (GradientKind kind : {GradientKind::position, GradientKind::velocity}) {
    for (int axis = 0; axis < shells.d; ++axis) {
      const GradientBlocks gb = commutator_blocks(values, shells, Direction{kind, axis});
      const double v =
          schatten_norm(dense_spectrum(weighted_operator(dense_gradient(gb, dense_ceiling), m), h, dim), p);
      (kind == GradientKind::position ? out.position : out.velocity).push_back(v);
      parts.push_back(v);
    }
  }
  out.total = sobolev_norm(parts, p);
  return out;
}

}  // namespace thermreg
