#pragma once

#include "thermreg/thermal_states.hpp"

#include <cmath>
#include <span>

namespace thermreg {

/// Laguerre polynomial L_n(x) by the three-term recurrence.
double laguerre(int n, double x);

/// Wigner function of the n-th one-dimensional oscillator eigenstate at |z|^2 = x^2 + xi^2:
/// f_n = 2 (-1)^n e^{-|z|^2 / hbar} L_n(2 |z|^2 / hbar), normalized so (1/h) int f_n dz = 1.
double eigen_wigner(int n, double hbar, double z_squared);

/// Partial generating sum sum_{n <= n_max} t^n f_n(z).
double eigen_wigner_series(double t, double hbar, double z_squared, int n_max);

/// Limit of eigen_wigner_series: (2 / (1 + t)) e^{-(|z|^2 / hbar)(1 - t)/(1 + t)}.
double eigen_wigner_generating(double t, double hbar, double z_squared);

/// Wigner function of the Maxwell-Boltzmann state, a centered Gaussian on R^{2d}:
/// f(z) = (rate / (2 pi))^d e^{-rate |z|^2 / 2}, rate = beta theta(beta hbar / 2).
/// Normalized as a probability density.
struct PhaseSpaceGaussian {
  int d = 1;
  double beta = 1.0;
  double hbar = 1.0;

  double rate() const;
  double prefactor() const;
  double at_squared_radius(double z_squared) const { return prefactor() * std::exp(-0.5 * rate() * z_squared); }
  /// z = (x_1..x_d, xi_1..xi_d).
  double operator()(std::span<const double> z) const;
};

PhaseSpaceGaussian thermal_wigner(int d, double beta, double hbar);

/// h^d Tr(|x|^n g_beta) = C_{d,n} / (rate / 2)^{n/2}.
double thermal_moment_closed(int d, double beta, double hbar, double n);

/// h^d Tr(|x|^n g_beta) (or |p|^n when `momentum`) evaluated in the eigenbasis on the
/// box of levels 0..K per axis, with K taken from the Maxwell-Boltzmann profile.
/// Even n uses the multinomial expansion of (sum x_i^2)^{n/2} over banded one-axis powers.
/// Odd n (d = 1 only) integrates |x|^n against the position density of the retained levels.
double thermal_moment_spectral(const OccupationProfile& maxwell_boltzmann, int n, bool momentum = false);

struct PhaseSpaceMoment {
  double value = 0.0;
  int order = 0;  // final Gauss-Hermite order per momentum axis
};

/// int |x|^n f(z) dz over R^{2d}: tensor Gauss-Hermite for even n, radial Gauss-Legendre
/// in position times Gauss-Hermite in momentum for odd n; the Hermite order doubles until
/// two successive values agree to rel_tol.
PhaseSpaceMoment phase_space_moment(const PhaseSpaceGaussian& f, int n, double rel_tol = 1e-12);

}  // namespace thermreg
