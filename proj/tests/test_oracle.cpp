#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "thermreg/norms.hpp"
#include "thermreg/oracle/dense.hpp"

#include <cmath>
#include <complex>
#include <numbers>

using namespace thermreg;
using C = std::complex<double>;

namespace {

ModelParams make(int d, double hbar, double beta, double lambda) {
  ModelParams m;
  m.d = d;
  m.hbar = hbar;
  m.beta = beta;
  m.lambda = lambda;
  return m;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::span<const double> span_of(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

OccupationProfile truncated(int d, double hbar, long K, double lambda = 1.0) {
  return solve_chemical_potential(make(d, hbar, 1.0, lambda), build_shell_table(d, hbar, K));
}

}  // namespace

TEST_CASE("dense basis") {
  const oracle::DenseBasis b(2, 3);
  CHECK(b.size() == 10);
  CHECK(b.index[0] == std::vector<int>{0, 0});
  CHECK(b.index[1] == std::vector<int>{1, 0});
  CHECK(b.index[2] == std::vector<int>{0, 1});
  CHECK(b.shell(2) == 1);
  CHECK(b.shell(9) == 3);
  CHECK(b.find({1, 2}) >= 0);
  CHECK(b.find({2, 2}) == -1);
  const SimplexBasis s(3, 4);
  const oracle::DenseBasis o(3, 4);
  REQUIRE(s.size() == o.size());
  for (long i = 0; i < o.size(); ++i) CHECK(s.row_of(o.index[i]) == i);
}

TEST_CASE("dense state") {
  for (int d : {1, 2}) {
    const OccupationProfile fd = truncated(d, 0.5, 10);
    const oracle::DenseOperator rho = oracle::dense_state(fd);
    const double h = 2 * std::numbers::pi * 0.5;
    CHECK(std::pow(h, d) * rho.entries.trace().real() == doctest::Approx(fd.normalization()).epsilon(1e-13));
    CHECK(rho.entries.isApprox(rho.entries.adjoint()));
  }
}

TEST_CASE("truncated Hamiltonian is diagonal below the top shell") {
  for (int d : {1, 2, 3}) {
    const long K = 6;
    const double hbar = 0.7;
    const oracle::DenseBasis b(d, K);
    const Eigen::MatrixXcd H = oracle::dense_hamiltonian(b, hbar);
    long inner = 0;
    while (b.shell(inner) < K) ++inner;
    for (long i = 0; i < inner; ++i)
      for (long j = 0; j < inner; ++j) {
        const double expected = i == j ? hbar * (b.shell(i) + 0.5 * d) : 0.0;
        CHECK(std::abs(H(i, j) - expected) < 1e-12);
      }
  }
}

TEST_CASE("gradient of a diagonal operator by hand") {
  const double hbar = 0.3;
  for (long K : {5L, 30L}) {
    const oracle::DenseBasis b(1, K);
    std::vector<double> f(K + 1);
    for (long j = 0; j <= K; ++j) f[j] = std::exp(-0.2 * j) + 0.1 * std::sin(j);
    const oracle::DenseOperator a = oracle::dense_diagonal(f, b);
    const Eigen::MatrixXcd dv = oracle::dense_gradient(a, b, hbar, {GradientKind::velocity, 0}).entries;
    const Eigen::MatrixXcd dx = oracle::dense_gradient(a, b, hbar, {GradientKind::position, 0}).entries;
    for (long j = 0; j < K; ++j) {
      const double x = std::sqrt(hbar * (j + 1) / 2.0);
      // -(i/hbar) [x, diag f] and (i/hbar) [p, diag f] with p = i sqrt(hbar/2)(a^+ - a)
      CHECK(std::abs(dv(j, j + 1) - C(0, -1) / hbar * x * (f[j + 1] - f[j])) < 1e-13);
      CHECK(std::abs(dv(j + 1, j) - C(0, -1) / hbar * x * (f[j] - f[j + 1])) < 1e-13);
      CHECK(std::abs(dx(j, j + 1) - C(1.0 / hbar * x * (f[j + 1] - f[j]), 0)) < 1e-13);
    }
    CHECK(dv.isApprox(dv.adjoint()));
    CHECK(dx.isApprox(dx.adjoint()));
  }
}

TEST_CASE("block gradients rebuild the dense commutator") {
  for (int d : {1, 2})
    for (long K : {4L, 8L, 12L}) {
      const double hbar = 0.4;
      const OccupationProfile fd = truncated(d, hbar, K);
      const oracle::DenseBasis b(d, K);
      const oracle::DenseOperator rho = oracle::dense_state(fd);
      for (GradientKind kind : {GradientKind::position, GradientKind::velocity})
        for (int axis = 0; axis < d; ++axis) {
          const Eigen::MatrixXcd fast = dense_gradient(commutator_blocks(fd, {kind, axis}));
          const Eigen::MatrixXcd ref = oracle::dense_gradient(rho, b, hbar, {kind, axis}).entries;
          CHECK((fast - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());
        }
    }
}

TEST_CASE("axis permutation leaves spectra unchanged") {
  const OccupationProfile fd = truncated(2, 0.5, 8);
  const oracle::DenseBasis b(2, 8);
  const oracle::DenseOperator rho = oracle::dense_state(fd);
  for (GradientKind kind : {GradientKind::position, GradientKind::velocity}) {
    const Eigen::VectorXd s0 = oracle::singular_values(oracle::dense_gradient(rho, b, 0.5, {kind, 0}).entries);
    const Eigen::VectorXd s1 = oracle::singular_values(oracle::dense_gradient(rho, b, 0.5, {kind, 1}).entries);
    CHECK((s0 - s1).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("Schatten norms agree with the dense reference") {
  for (int d : {1, 2})
    for (long K : {4L, 8L, 12L})
      for (double lambda : {0.1, 1.0}) {
        const double hbar = 0.35;
        const double h = 2 * std::numbers::pi * hbar;
        const OccupationProfile fd = truncated(d, hbar, K, lambda);
        const oracle::DenseBasis b(d, K);
        const oracle::DenseOperator rho = oracle::dense_state(fd);
        for (double p : {1.0, 2.0, 3.0, 4.0, kInfinity}) {
          const double state = diagonal_schatten_norm(span_of(fd.density), fd.shells, p);
          CHECK(state == doctest::Approx(oracle::schatten(oracle::singular_values(rho.entries), h, d, p)).epsilon(1e-12));
          for (GradientKind kind : {GradientKind::position, GradientKind::velocity}) {
            const double fast = block_schatten_norm(commutator_blocks(fd, {kind, 0}), p);
            const double ref =
                oracle::schatten(oracle::singular_values(oracle::dense_gradient(rho, b, hbar, {kind, 0}).entries), h, d, p);
            CHECK(fast == doctest::Approx(ref).epsilon(1e-10));
          }
        }
      }
}

TEST_CASE("weights and Sobolev norms agree with the dense reference") {
  for (int d : {1, 2})
    for (long K : {4L, 8L, 12L}) {
      const double hbar = 0.35;
      const ShellTable shells = build_shell_table(d, hbar, K);
      for (int n : {0, 1, 2, 3}) {
        const Eigen::MatrixXd lib = momentum_weight(shells, WeightSpec{n});
        const Eigen::MatrixXd ref = oracle::dense_weight(d, K, hbar, n);
        CHECK((lib - ref).cwiseAbs().maxCoeff() <= 1e-10 * ref.cwiseAbs().maxCoeff());
      }
      const OccupationProfile fd = truncated(d, hbar, K);
      for (int n : {0, 2})
        for (double p : {1.0, 2.0, 4.0, kInfinity}) {
          const double lib = sobolev_norm(span_of(fd.density), shells, WeightSpec{n}, p).total;
          const double ref = oracle::dense_sobolev(to_vector(fd.density), d, K, hbar, n, p, d);
          CHECK(lib == doctest::Approx(ref).epsilon(1e-10));
        }
    }
}
