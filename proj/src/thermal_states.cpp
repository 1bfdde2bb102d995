#include "thermreg/thermal_states.hpp"

#include "thermreg/errors.hpp"
#include "thermreg/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace thermreg {

namespace {

constexpr double kFlushThreshold = 1e-300;

double log_fermi_factor(double x) {
  // log (1 + e^x)^{-1}
  return x > 0.0 ? -x - std::log1p(std::exp(-x)) : -std::log1p(std::exp(x));
}

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// log of the ratio bound t_{k+1}/t_k valid for every k >= K.
double log_tail_ratio(int d, double beta, double hbar, long K, double E_K, std::optional<double> mu, double power,
                      double energy_power) {
  const double Kd = static_cast<double>(K);
  double lr = std::log((Kd + d) / (Kd + 1.0));
  double occ = -beta * hbar;
  if (mu) occ += std::log1p(std::exp(-beta * (E_K - *mu)));
  lr += power * occ;
  if (energy_power != 0.0) lr += energy_power * std::log((Kd + 1.0 + 0.5 * d) / (Kd + 0.5 * d));
  return lr;
}

double log_term(const ShellTable& shells, long k, double beta, std::optional<double> mu, double power,
                double energy_power) {
  const double E = shells.energies(k);
  const double occ = mu ? log_fermi_factor(beta * (E - *mu)) : -beta * E;
  double t = std::log(shells.mults(k)) + power * occ;
  if (energy_power != 0.0) t += energy_power * std::log(E);
  return t;
}

long scan_cutoff(const ModelParams& p, std::optional<double> mu, double power, double energy_power, long min_K,
                 long max_K) {
  const double log_tol = std::log(p.tail_tol);
  double log_sum = -std::numeric_limits<double>::infinity();
  const double half_d = 0.5 * p.d;
  double g = 1.0;
  for (long k = 0; k <= max_K; ++k) {
    if (k > 0) g = g * static_cast<double>(k + p.d - 1) / static_cast<double>(k);
    const double E = (static_cast<double>(k) + half_d) * p.hbar;
    const double occ = mu ? log_fermi_factor(p.beta * (E - *mu)) : -p.beta * E;
    double lt = std::log(g) + power * occ;
    if (energy_power != 0.0) lt += energy_power * std::log(E);
    log_sum = log_add(log_sum, lt);
    if (k < min_K) continue;
    const double lq = log_tail_ratio(p.d, p.beta, p.hbar, k, E, mu, power, energy_power);
    if (lq >= 0.0) continue;
    const double log_tail = lt + lq - std::log(-std::expm1(lq));
    if (log_tail - log_sum <= log_tol) return k;
  }
  throw ConvergenceError("choose_cutoff: tail tolerance not reached below K = " + std::to_string(max_K));
}

}  // namespace

double ModelParams::h() const { return planck(hbar); }

double ModelParams::particle_number() const { return lambda / std::pow(h(), d); }

void ModelParams::validate() const {
  if (d < 1) throw InvalidArgument("dimension must be >= 1");
  if (!std::isfinite(hbar) || hbar <= 0.0) throw InvalidArgument("hbar must be finite and positive");
  if (!std::isfinite(beta) || beta <= 0.0) throw InvalidArgument("beta must be finite and positive");
  if (!std::isfinite(lambda) || lambda <= 0.0) throw InvalidArgument("lambda must be finite and positive");
  if (!(tail_tol > 0.0) || !(mu_tol > 0.0)) throw InvalidArgument("tolerances must be positive");
}

const char* to_string(StateKind kind) {
  return kind == StateKind::fermi_dirac ? "fermi_dirac" : "maxwell_boltzmann";
}

double fermi_factor(double x) {
  if (x > 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

double OccupationProfile::normalization() const {
  CompensatedSum<> s;
  for (long k = 0; k <= shells.K; ++k) s += shells.mults(k) * density(k);
  return std::pow(shells.h(), shells.d) * s.value();
}

Eigen::VectorXd OccupationProfile::sqrt_density() const { return density.array().sqrt().matrix(); }

double log_partition_closed(int d, double beta, double hbar) {
  if (d < 1 || !(beta > 0.0) || !(hbar >= 0.0)) throw InvalidArgument("partition_closed: bad arguments");
  const double x = 0.5 * beta * hbar;
  double log_shc;
  if (x == 0.0)
    log_shc = 0.0;
  else if (x > 30.0)
    log_shc = x + std::log1p(-std::exp(-2.0 * x)) - std::numbers::ln2 - std::log(x);
  else
    log_shc = std::log(std::sinh(x) / x);
  return d * (std::log(2.0 * std::numbers::pi / beta) - log_shc);
}

double partition_closed(int d, double beta, double hbar) { return std::exp(log_partition_closed(d, beta, hbar)); }

double relative_tail_bound(const ShellTable& shells, double beta, std::optional<double> mu, double power,
                           double energy_power) {
  const long K = shells.K;
  double log_sum = -std::numeric_limits<double>::infinity();
  for (long k = 0; k <= K; ++k) log_sum = log_add(log_sum, log_term(shells, k, beta, mu, power, energy_power));
  const double lq =
      log_tail_ratio(shells.d, beta, shells.hbar, K, shells.energies(K), mu, power, energy_power);
  if (lq >= 0.0) return std::numeric_limits<double>::infinity();
  const double log_tail = log_term(shells, K, beta, mu, power, energy_power) + lq - std::log(-std::expm1(lq));
  return std::exp(log_tail - log_sum);
}

SpectralPartition partition_spectral(const ShellTable& shells, double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("partition_spectral: beta must be positive");
  const double E0 = shells.energies(0);
  CompensatedSum<> s;
  for (long k = 0; k <= shells.K; ++k) s += shells.mults(k) * std::exp(-beta * (shells.energies(k) - E0));
  SpectralPartition out;
  out.value = std::exp(shells.d * std::log(shells.h()) - beta * E0) * s.value();
  out.relative_tail = relative_tail_bound(shells, beta, std::nullopt);
  return out;
}

double fermi_shell_sum(const ShellTable& shells, double beta, double mu) {
  CompensatedSum<> s;
  for (long k = 0; k <= shells.K; ++k) s += shells.mults(k) * fermi_factor(beta * (shells.energies(k) - mu));
  return s.value();
}

namespace {

double fermi_shell_derivative(const ShellTable& shells, double beta, double mu) {
  CompensatedSum<> s;
  for (long k = 0; k <= shells.K; ++k) {
    const double n = fermi_factor(beta * (shells.energies(k) - mu));
    s += shells.mults(k) * n * (1.0 - n);
  }
  return beta * s.value();
}

}  // namespace

OccupationProfile solve_chemical_potential(const ModelParams& params, const ShellTable& shells) {
  params.validate();
  if (shells.d != params.d || shells.hbar != params.hbar)
    throw InvalidArgument("solve_chemical_potential: shell table does not match parameters");
  const double N = params.particle_number();
  const double beta = params.beta;
  const double E0 = shells.energies(0);

  CompensatedSum<> states;
  for (long k = 0; k <= shells.K; ++k) states += shells.mults(k);
  if (states.value() <= N)
    throw BracketError("chemical potential unreachable: " + std::to_string(states.value()) +
                       " states below the cutoff cannot hold N = " + std::to_string(N) +
                       " particles (cutoff too small)");

  auto residual = [&](double mu) { return fermi_shell_sum(shells, beta, mu) - N; };

  double lo = E0 - 50.0 / beta;
  double hi = shells.energies(shells.K);
  for (int i = 0; residual(hi) < 0.0; ++i) {
    if (i == 200) throw BracketError("chemical potential: upper bracket not found");
    hi += (hi - E0) + shells.hbar;
  }
  for (int i = 0; residual(lo) > 0.0; ++i) {
    if (i == 200) throw BracketError("chemical potential: lower bracket not found");
    lo -= 2.0 * (hi - lo);
  }

  for (int it = 0; it < 4000; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (residual(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  double mu = std::abs(residual(lo)) <= std::abs(residual(hi)) ? lo : hi;
  double best = std::abs(residual(mu));
  for (int it = 0; it < 3; ++it) {
    const double deriv = fermi_shell_derivative(shells, beta, mu);
    if (!(deriv > 0.0)) break;
    const double cand = mu - residual(mu) / deriv;
    const double r = std::abs(residual(cand));
    if (!(r < best)) break;
    mu = cand;
    best = r;
  }
  if (best > params.mu_tol * N)
    throw ConvergenceError("chemical potential: residual " + std::to_string(best / N) + " above tolerance");

  OccupationProfile prof;
  prof.params = params;
  prof.kind = StateKind::fermi_dirac;
  prof.shells = shells;
  prof.mu = mu;
  prof.level_occupation.resize(shells.K + 1);
  prof.density.resize(shells.K + 1);
  long flushed = 0;
  for (long k = 0; k <= shells.K; ++k) {
    double n = fermi_factor(beta * (shells.energies(k) - mu));
    double r = n / params.lambda;
    if (r < kFlushThreshold) {
      r = 0.0;
      n = 0.0;
      ++flushed;
    }
    prof.level_occupation(k) = n;
    prof.density(k) = r;
  }
  prof.Z_beta = partition_spectral(shells, beta).value;
  prof.Z_mu = std::exp(std::log(params.lambda) - beta * mu);
  prof.tail = TailReport{shells.K, relative_tail_bound(shells, beta, mu), flushed};

  const double ceiling = 1.0 / params.lambda;
  if (prof.density.maxCoeff() > ceiling)
    throw ConvergenceError("Pauli ceiling violated: rho eigenvalue reaches 1/lambda");
  return prof;
}

OccupationProfile occupations(const ModelParams& params, const ShellTable& shells, StateKind kind) {
  if (kind == StateKind::fermi_dirac) return solve_chemical_potential(params, shells);
  params.validate();
  if (shells.d != params.d || shells.hbar != params.hbar)
    throw InvalidArgument("occupations: shell table does not match parameters");

  const double beta = params.beta;
  const double E0 = shells.energies(0);
  CompensatedSum<> s;
  for (long k = 0; k <= shells.K; ++k) s += shells.mults(k) * std::exp(-beta * (shells.energies(k) - E0));
  const double hd = std::pow(shells.h(), shells.d);

  OccupationProfile prof;
  prof.params = params;
  prof.kind = StateKind::maxwell_boltzmann;
  prof.shells = shells;
  prof.level_occupation.resize(shells.K + 1);
  prof.density.resize(shells.K + 1);
  long flushed = 0;
  for (long k = 0; k <= shells.K; ++k) {
    double r = std::exp(-beta * (shells.energies(k) - E0)) / (hd * s.value());
    if (r < kFlushThreshold) {
      r = 0.0;
      ++flushed;
    }
    prof.density(k) = r;
    prof.level_occupation(k) = params.lambda * r;
  }
  prof.Z_beta = std::exp(shells.d * std::log(shells.h()) - beta * E0) * s.value();
  prof.Z_mu = prof.Z_beta;
  prof.tail = TailReport{shells.K, relative_tail_bound(shells, beta, std::nullopt), flushed};
  return prof;
}

long choose_cutoff(const ModelParams& params, StateKind kind, double power, double energy_power, long max_K) {
  params.validate();
  constexpr long kMinK = 4;
  if (kind == StateKind::maxwell_boltzmann)
    return scan_cutoff(params, std::nullopt, power, energy_power, kMinK, max_K);

  const double N = params.particle_number();
  // Start from a cutoff that at least holds N particles, then alternate mu solves and tail scans.
  long K = scan_cutoff(params, std::nullopt, power, energy_power, kMinK, max_K);
  while (binomial(K + params.d, params.d) <= 2.0 * N) {
    if (K > max_K) throw ConvergenceError("choose_cutoff: particle number needs K beyond limit");
    K *= 2;
  }
  for (int round = 0; round < 64; ++round) {
    const ShellTable shells = build_shell_table(params.d, params.hbar, K);
    const double mu = *solve_chemical_potential(params, shells).mu;
    const long next = scan_cutoff(params, mu, power, energy_power, kMinK, max_K);
    if (next == K) return K;
    if (next < K) {
      // verify the smaller cutoff with its own mu
      const ShellTable small = build_shell_table(params.d, params.hbar, next);
      if (binomial(next + params.d, params.d) > N) {
        const double mu_small = *solve_chemical_potential(params, small).mu;
        if (relative_tail_bound(small, params.beta, mu_small, power, energy_power) <= params.tail_tol) return next;
      }
      return K;
    }
    K = next;
  }
  throw ConvergenceError("choose_cutoff: cutoff iteration did not settle");
}

OccupationProfile thermal_profile(const ModelParams& params, StateKind kind, double power, double energy_power) {
  const long K = choose_cutoff(params, kind, power, energy_power);
  return occupations(params, build_shell_table(params.d, params.hbar, K), kind);
}

Eigen::VectorXd fugacity_operator_values(const OccupationProfile& fd) {
  if (fd.kind != StateKind::fermi_dirac || !fd.mu)
    throw InvalidArgument("fugacity_operator_values: needs a solved Fermi-Dirac profile");
  const double beta = fd.params.beta;
  const double log_lambda = std::log(fd.params.lambda);
  Eigen::VectorXd a(fd.shells.K + 1);
  for (long k = 0; k <= fd.shells.K; ++k) {
    const double v = std::exp(-beta * (fd.shells.energies(k) - *fd.mu) - log_lambda);
    a(k) = v < kFlushThreshold ? 0.0 : v;
  }
  return a;
}

}  // namespace thermreg
