#pragma once

#include "thermreg/gradients.hpp"
#include "thermreg/norms.hpp"
#include "thermreg/thermal_states.hpp"

#include <string>

namespace thermreg {

/// theta(x) = tanh(x)/x with theta(0) = 1.
double theta(double x);

/// C_{d,n} = Gamma((d+n)/2) / Gamma(d/2).
double moment_constant(int d, double n);

/// One inequality check lhs <= rhs (1 + slack).
struct BoundReport {
  std::string bound_id;
  double p = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double slack = 1e-9;
  bool pass = false;
};

BoundReport make_report(std::string bound_id, double p, double lhs, double rhs, double slack = 1e-9);

/// Factors of  C_{d,p} beta^{1/2-d/p} / Z * max(2 sqrt 2, beta hbar)^{1/2-1/p} / theta(beta hbar)^{1/p}
/// with C_{d,p} = 2^{5/4 + (2d+1)/p} C_{d,1,p} pi^{d/p} and C_{d,1,p} = C_{d,2}^{1/p}.
struct MainBoundFactors {
  double moment_constant = 0.0;   // C_{d,2} = d/2
  double C_d1p = 0.0;             // C_{d,2}^{1/p}
  double power_of_two = 0.0;      // 2^{5/4 + (2d+1)/p}
  double power_of_pi = 0.0;       // pi^{d/p}
  double C_dp = 0.0;
  double beta_factor = 0.0;       // beta^{1/2 - d/p}
  double max_factor = 0.0;        // max(2 sqrt 2, beta hbar)^{1/2 - 1/p}
  double theta_factor = 0.0;      // theta(beta hbar)^{-1/p}
  double inverse_Z = 0.0;         // 1 / Z
  double rhs = 0.0;
};

/// `constant_scale` multiplies C_{d,p}; it exists only to exercise failure paths.
MainBoundFactors main_bound_factors(int d, double beta, double hbar, double Z, double p,
                                    double constant_scale = 1.0);

/// Right-hand side of the gradient bound for rho_beta (Z = Z_mu from the profile).
double rhs_main_bound(const OccupationProfile& profile, double p, double constant_scale = 1.0);

/// (2 / Z) max(sqrt(beta), beta sqrt(hbar)).
double linf_gradient_rhs(double beta, double hbar, double Z);

/// ||D rho||_{L^p} for one gradient direction (fast block path).
double gradient_norm(const OccupationProfile& profile, Direction direction, double p, NormConvention conv = {});

/// Three forms of the constant C_{lambda,beta} for the branch mu >= d hbar / 2.
struct FugacityConstants {
  bool low_branch = false;    // mu <= d hbar / 2, where C = 2
  double over_pi = 0.0;       // 1 + e^{beta lambda^{1/d} / pi}
  double over_two_pi = 0.0;   // 1 + e^{beta lambda^{1/d} / (2 pi)}
  double level_spacing = 0.0;  // 1 + e^{2 beta hbar N^{1/d}}
  double used = 0.0;          // largest applicable value
};

FugacityConstants fugacity_constants(const OccupationProfile& fermi_dirac);

struct FugacitySandwich {
  FugacityConstants constants;
  BoundReport upper;  // Z_mu <= Z_beta, zero slack
  BoundReport lower;  // Z_beta / C <= Z_mu
};

/// Both sides of C^{-1} Z_beta <= Z_mu <= Z_beta, with Z_beta in closed form.
FugacitySandwich fugacity_sandwich(const OccupationProfile& fermi_dirac, double slack = 1e-9);

/// mu <= 2 N^{1/d} hbar + d hbar / 2; only meaningful when mu >= d hbar / 2 (else the
/// report passes vacuously with lhs = mu and rhs = d hbar / 2).
BoundReport mu_bound(const OccupationProfile& fermi_dirac, double slack = 1e-9);

/// || |x|^n e^{-beta H} ||_{L^inf} (or with |p|^n) in d = 1 on levels 0..K, via functional
/// calculus of the truncated tridiagonal operator.
double weight_gaussian_norm(double beta, double hbar, int n, long K, bool momentum = false,
                            long dense_ceiling = 4000);

/// lhs = || |x|^n e^{-beta H} ||^{2/n}, rhs = n max(2 / beta, sqrt(2) hbar).
BoundReport linf_weight_bound(double beta, double hbar, int n, long K, double slack = 1e-9,
                              long dense_ceiling = 4000);

/// max_x |x|^n e^{-beta x^2} = (n / (2 e beta))^{n/2}.
double classical_weight_maximum(int n, double beta);

struct ClassicalNorm {
  double quadrature = 0.0;     // radial quadrature; the reference value
  double gamma_formula = 0.0;  // omega_{2d} Gamma((2d+p)/2) (beta p)^{-(2d+p)/2} route, as printed
  double ratio = 0.0;          // quadrature / gamma_formula
};

/// || grad_z (Z^{-1} e^{-beta |z|^2}) ||_{L^p(R^{2d})} with Z = (pi / beta)^d.
ClassicalNorm classical_reference_norm(int d, double beta, double p, double rel_tol = 1e-12);

/// || x_axis e^{-s beta H} ||_{L^p} on the truncated space (p in {2, 4, inf} or any p >= 1).
double position_gaussian_norm(const ShellTable& shells, double beta, double s, double p, NormConvention conv = {});

/// 2 beta Z^{-1} int_{1/2}^1 || x e^{-s beta H} ||_{L^p} ds  (Gauss-Legendre in s).
double split_integral_bound(const OccupationProfile& profile, double p, NormConvention conv = {},
                            int quadrature_order = 16);

struct SqrtLemmaTerms {
  double lhs = 0.0;           // ||D sqrt(rho)||_p
  double sqrt_G = 0.0;        // ||D sqrt(G_mu)||_p
  double sqrt_rho_q = 0.0;    // ||sqrt(rho)||_q
  double grad_G_r = 0.0;      // ||D G_mu||_r
  double rhs = 0.0;
};

/// ||D sqrt rho||_p <= ||D sqrt G_mu||_p + (lambda/2) ||sqrt rho||_q ||D G_mu||_r, 1/p = 1/q + 1/r.
SqrtLemmaTerms sqrt_lemma_terms(const OccupationProfile& fermi_dirac, Direction direction, double p, double q,
                                double r, NormConvention conv = {});

}  // namespace thermreg
