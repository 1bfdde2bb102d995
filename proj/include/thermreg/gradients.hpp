#pragma once

#include "thermreg/spectral_core.hpp"
#include "thermreg/thermal_states.hpp"

#include <Eigen/Core>

#include <span>

namespace thermreg {

/// Which quantum gradient: D_x A = [grad, A] or D_v A = [x/(i hbar), A].
enum class GradientKind { position, velocity };

struct Direction {
  GradientKind kind = GradientKind::position;
  int axis = 0;  // spatial axis, 0 <= axis < d
};

const char* to_string(GradientKind kind);

/// Block-tridiagonal form of a quantum gradient of an operator diagonal in the shells.
///
/// Along one axis the gradient of f(H) splits into independent chains indexed by the
/// transverse quantum-number sum r = 0..K (for d = 1 only r = 0). Chain r has
/// K - r + 1 levels, occurs g_{r,d-1} times, and carries zero diagonal with
/// off-diagonal
///
///     entry(r, j) = sqrt(hbar (j + 1) / 2) * shell_coeff[j + r],   j = 0..K-r-1.
///
/// For the direct commutator shell_coeff[k] = (v_{k+1} - v_k) / hbar; the 1/hbar of
/// both gradients is folded in (`hbar_folded`). The entries are the real symmetric
/// gauge of the operator: D_x carries them as is, D_v as -i entry(r, j) above the
/// diagonal and +i entry(r, j) below; both have the same singular values.
struct GradientBlocks {
  Direction direction;
  int d = 1;
  double hbar = 1.0;
  long K = 0;
  Eigen::VectorXd shell_coeff;  // size K
  bool hbar_folded = true;

  long block_count() const;                 // K + 1 for d >= 2, 1 for d = 1
  long block_size(long r) const { return K - r + 1; }
  double block_multiplicity(long r) const;  // g_{r,d-1}
  double entry(long r, long j) const;
  SymTridiagonalXd block(long r) const;
  /// Sum over blocks of multiplicity * size; equals C(K+d, d).
  double represented_dimension() const;
};

/// Quantum gradient of the operator with eigenvalue values[k] on shell k.
GradientBlocks commutator_blocks(std::span<const double> shell_values, const ShellTable& shells, Direction direction);

/// Quantum gradient of the state rho described by `profile`.
GradientBlocks commutator_blocks(const OccupationProfile& profile, Direction direction);

/// Quantum gradient of sqrt(rho) (eigenvalues are exact square roots in the eigenbasis).
GradientBlocks sqrt_gradient_blocks(const OccupationProfile& profile, Direction direction);

enum class DuhamelPath { analytic, gauss_legendre };

struct DuhamelResult {
  GradientBlocks blocks;
  /// Set when some adjacent-shell ratio a_k / a_{k+1} spans more than `kWideRatioLog`
  /// in log; the quadrature path is then unreliable and the analytic path should be used.
  bool wide_ratio_warning = false;
  static constexpr double kWideRatioLog = 30.0;
};

/// Gradient of rho evaluated from the Duhamel representation
///   D rho = -beta int_0^1 G_mu^{1-s} (1 + lambda G_mu)^{-1} (D H) (1 + lambda G_mu)^{-1} G_mu^s ds
/// (Fermi-Dirac) or  D g = -beta int_0^1 g^{1-s} (D H) g^s ds  (Maxwell-Boltzmann), entrywise
/// in the eigenbasis. The s-integral is either the logarithmic mean (a - b)/ln(a/b) or a
/// Gauss-Legendre rule of the given order.
DuhamelResult duhamel_blocks(const OccupationProfile& profile, Direction direction,
                             DuhamelPath path = DuhamelPath::analytic, int quadrature_order = 20);

}  // namespace thermreg
