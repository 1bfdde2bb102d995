#pragma once

#include "thermreg/gradients.hpp"
#include "thermreg/spectral_core.hpp"

#include <Eigen/Core>

#include <limits>
#include <span>
#include <vector>

namespace thermreg {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Exponent of h in the semiclassical Schatten prefactor h^{D/p}.
enum class SchattenScale {
  dimension,  // D = d
  three       // D = 3 regardless of d
};

/// Conventions that change numerical values; recorded in every run manifest.
struct NormConvention {
  SchattenScale scale = SchattenScale::dimension;
  /// Weight exponent n = 0 means m = identity; when false, m = 1 + |p|^0 = 2 identity.
  bool zero_weight_is_identity = true;

  double prefactor_dim(int d) const { return scale == SchattenScale::dimension ? d : 3.0; }
};

/// Weighted multiset of singular values with the semiclassical scale attached.
struct SingularSpectrum {
  Eigen::VectorXd values;   // nonincreasing, nonnegative
  Eigen::VectorXd weights;  // multiplicities
  double h = 1.0;
  double prefactor_dim = 1.0;

  double max() const { return values.size() ? values(0) : 0.0; }
};

/// Sorts |values| in nonincreasing order together with their weights.
SingularSpectrum make_spectrum(std::vector<double> values, std::vector<double> weights, double h,
                               double prefactor_dim);

/// h^{D/p} (sum_i w_i sigma_i^p)^{1/p}; p = infinity gives sigma_max. Throws for p < 1.
double schatten_norm(const SingularSpectrum& spectrum, double p);

/// Spectrum of an operator diagonal in the shells (state, sqrt of state, ...).
SingularSpectrum diagonal_spectrum(std::span<const double> shell_values, const ShellTable& shells,
                                   NormConvention conv = {});
double diagonal_schatten_norm(std::span<const double> shell_values, const ShellTable& shells, double p,
                              NormConvention conv = {});

/// Singular values of a gradient: absolute eigenvalues of every tridiagonal block,
/// counted with the block multiplicity.
SingularSpectrum singular_spectrum(const GradientBlocks& gb, NormConvention conv = {});

/// Schatten norm of a gradient without forming its full spectrum when possible:
/// p = 2 through the shell identity sum_r g_{r,d-1} (k - r + 1) = C(k + d, d),
/// p = 4 through tr B^4 of each block, p = infinity through Sturm bisection;
/// other p fall back to singular_spectrum.
double block_schatten_norm(const GradientBlocks& gb, double p, NormConvention conv = {});

/// Momentum weight m = 1 + |p|^n. n is a nonnegative integer.
struct WeightSpec {
  int n = 0;
};

/// Dense P (sum_i p_i^2) P on the truncated simplex basis (graded-lex order).
Eigen::MatrixXd momentum_squared_dense(const ShellTable& shells, long dense_ceiling = 4000);

/// m = 1 + |p|^n by functional calculus: parity blocks of p^2 (d = 1) or a dense
/// eigendecomposition of |p|^2 (d >= 2).
Eigen::MatrixXd momentum_weight(const ShellTable& shells, WeightSpec weight, NormConvention conv = {},
                                long dense_ceiling = 4000);

/// m = 1 + (P p^2 P)^{n/2} by repeated banded products; n must be even.
Eigen::MatrixXd momentum_weight_banded(const ShellTable& shells, WeightSpec weight, NormConvention conv = {},
                                       long dense_ceiling = 4000);

/// Dense matrix of a gradient on the simplex basis, with the D_x / D_v phase convention.
Eigen::MatrixXcd dense_gradient(const GradientBlocks& gb, long dense_ceiling = 4000);

/// Dense diagonal operator with shell_values on the simplex basis.
Eigen::MatrixXd dense_shell_diagonal(std::span<const double> shell_values, const ShellTable& shells,
                                     long dense_ceiling = 4000);

/// A m, formed densely.
Eigen::MatrixXcd weighted_operator(const Eigen::MatrixXcd& op, const Eigen::MatrixXd& weight);

/// Singular values of a dense operator via SVD.
SingularSpectrum dense_spectrum(const Eigen::MatrixXcd& op, double h, double prefactor_dim);

/// (sum_i parts_i^p)^{1/p}, or max for p = infinity.
double sobolev_norm(std::span<const double> parts, double p);

struct SobolevParts {
  double state = 0.0;                // ||A m||
  std::vector<double> position;      // ||D_{x_i} A m|| per axis
  std::vector<double> velocity;      // ||D_{v_i} A m|| per axis
  double total = 0.0;
};

/// W^{1,p}(m) norm of the shell-diagonal operator A: every axis of both gradients
/// contributes one term.
SobolevParts sobolev_norm(std::span<const double> shell_values, const ShellTable& shells, WeightSpec weight,
                          double p, NormConvention conv = {}, long dense_ceiling = 4000);

}  // namespace thermreg
