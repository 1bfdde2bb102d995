#pragma once

#include "thermreg/spectral_core.hpp"

#include <Eigen/Core>

#include <optional>

namespace thermreg {

/// Physical and numerical parameters of one configuration.
///
/// The density parameter lambda = N h^d is the primary input; N = lambda / h^d is
/// derived and need not be an integer.
struct ModelParams {
  int d = 1;
  double hbar = 1.0;
  double beta = 1.0;
  double lambda = 1.0;
  double tail_tol = 1e-14;  // relative truncation tail allowed in shell sums
  double mu_tol = 1e-12;    // relative residual of the trace constraint

  double h() const;
  double particle_number() const;  // N = lambda / h^d
  void validate() const;
};

enum class StateKind { fermi_dirac, maxwell_boltzmann };

const char* to_string(StateKind kind);

/// Truncation bookkeeping for a shell sum.
struct TailReport {
  long K = 0;
  double relative_tail = 0.0;  // bound on the omitted part relative to the retained sum
  long flushed = 0;            // shell values below 1e-300 set to exactly zero
};

/// Per-shell eigenvalues of a thermal state of H.
///
/// `density(k)` is the eigenvalue of rho on shell k, normalized so that
/// h^d sum_k g_k density(k) = 1. `level_occupation(k) = lambda * density(k)` is the
/// mean occupation of one state in shell k (the Fermi-Dirac factor for fermi_dirac).
struct OccupationProfile {
  ModelParams params;
  StateKind kind = StateKind::fermi_dirac;
  ShellTable shells;
  Eigen::VectorXd level_occupation;
  Eigen::VectorXd density;
  std::optional<double> mu;  // fermi_dirac only
  double Z_beta = 0.0;       // spectral h^d tr e^{-beta H} on the truncated space
  double Z_mu = 0.0;         // lambda e^{-beta mu}; equals Z_beta for maxwell_boltzmann
  TailReport tail;

  long K() const { return shells.K; }
  /// h^d tr(rho) evaluated on the truncated space.
  double normalization() const;
  /// Eigenvalues of sqrt(rho), shell by shell.
  Eigen::VectorXd sqrt_density() const;
};

/// Closed form Z_beta = (2 pi / beta)^d / shc(beta hbar / 2)^d, shc(x) = sinh(x)/x.
double partition_closed(int d, double beta, double hbar);
double log_partition_closed(int d, double beta, double hbar);

struct SpectralPartition {
  double value = 0.0;
  double relative_tail = 0.0;  // +inf when the geometric tail bound does not apply at K
};

/// h^d sum_k g_k e^{-beta E_k} on the shells of `shells`, with a tail estimate.
SpectralPartition partition_spectral(const ShellTable& shells, double beta);

/// Upper bound on the relative tail of sum_k g_k occ_k^power E_k^energy_power beyond
/// the last shell, where occ is the Fermi-Dirac factor at chemical potential `mu`
/// (or the Boltzmann factor when `mu` is empty).
double relative_tail_bound(const ShellTable& shells, double beta, std::optional<double> mu, double power = 1.0,
                           double energy_power = 0.0);

/// Smallest cutoff K whose relative tail is below params.tail_tol, for the statistics
/// `kind` (solving for mu as needed). `power` raises occupations (2 for squared norms)
/// and `energy_power` adds polynomial weights E_k^energy_power.
long choose_cutoff(const ModelParams& params, StateKind kind, double power = 1.0, double energy_power = 0.0,
                   long max_K = 20'000'000);

/// Fermi-Dirac profile with mu fixed by h^d tr(rho) = 1 on the given shells.
OccupationProfile solve_chemical_potential(const ModelParams& params, const ShellTable& shells);

/// Thermal profile of the requested kind on the given shells.
OccupationProfile occupations(const ModelParams& params, const ShellTable& shells, StateKind kind);

/// Convenience: choose the cutoff by the tail policy, then build the profile.
OccupationProfile thermal_profile(const ModelParams& params, StateKind kind, double power = 1.0,
                                  double energy_power = 0.0);

/// Eigenvalues of G_mu = lambda^{-1} e^{-beta (H - mu)} = Z_mu^{-1} e^{-beta H} per shell.
Eigen::VectorXd fugacity_operator_values(const OccupationProfile& fermi_dirac);

/// Sum_k g_k (1 + e^{beta (E_k - mu)})^{-1}.
double fermi_shell_sum(const ShellTable& shells, double beta, double mu);

/// Stable (1 + e^{x})^{-1}.
double fermi_factor(double x);

}  // namespace thermreg
