#include "thermreg/bounds.hpp"

#include "thermreg/errors.hpp"
#include "thermreg/numeric.hpp"
#include "thermreg/quadrature.hpp"
#include "thermreg/tridiagonal.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace thermreg {

namespace {

constexpr double kPi = std::numbers::pi;

double inverse_p(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

}  // namespace

double theta(double x) {
  if (x < 0.0) throw InvalidArgument("theta: argument must be nonnegative");
  if (x < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0;
  }
  return std::tanh(x) / x;
}

double moment_constant(int d, double n) { return std::exp(std::lgamma(0.5 * (d + n)) - std::lgamma(0.5 * d)); }

BoundReport make_report(std::string bound_id, double p, double lhs, double rhs, double slack) {
  BoundReport r;
  r.bound_id = std::move(bound_id);
  r.p = p;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = slack;
  r.ratio = rhs > 0.0 ? lhs / rhs : (lhs == 0.0 ? 0.0 : kInfinity);
  r.pass = std::isfinite(r.ratio) && r.ratio <= 1.0 + slack;
  return r;
}

MainBoundFactors main_bound_factors(int d, double beta, double hbar, double Z, double p, double constant_scale) {
  if (!(p >= 1.0)) throw InvalidArgument("main bound: p must satisfy p >= 1");
  const double ip = inverse_p(p);
  MainBoundFactors f;
  f.moment_constant = moment_constant(d, 2.0);
  f.C_d1p = std::pow(f.moment_constant, ip);
  f.power_of_two = std::pow(2.0, 1.25 + (2.0 * d + 1.0) * ip);
  f.power_of_pi = std::pow(kPi, d * ip);
  f.C_dp = constant_scale * f.power_of_two * f.C_d1p * f.power_of_pi;
  f.beta_factor = std::pow(beta, 0.5 - d * ip);
  f.max_factor = std::pow(std::max(2.0 * std::numbers::sqrt2, beta * hbar), 0.5 - ip);
  f.theta_factor = std::pow(theta(beta * hbar), -ip);
  f.inverse_Z = 1.0 / Z;
  f.rhs = f.C_dp * f.beta_factor * f.inverse_Z * f.max_factor * f.theta_factor;
  return f;
}

double rhs_main_bound(const OccupationProfile& profile, double p, double constant_scale) {
  const ModelParams& m = profile.params;
  return main_bound_factors(m.d, m.beta, m.hbar, profile.Z_mu, p, constant_scale).rhs;
}

double linf_gradient_rhs(double beta, double hbar, double Z) {
  return 2.0 / Z * std::max(std::sqrt(beta), beta * std::sqrt(hbar));
}

double gradient_norm(const OccupationProfile& profile, Direction direction, double p, NormConvention conv) {
  return block_schatten_norm(commutator_blocks(profile, direction), p, conv);
}

FugacityConstants fugacity_constants(const OccupationProfile& fd) {
  if (fd.kind != StateKind::fermi_dirac || !fd.mu) throw InvalidArgument("fugacity constants need a Fermi-Dirac profile");
  const ModelParams& m = fd.params;
  FugacityConstants c;
  c.low_branch = *fd.mu <= 0.5 * m.d * m.hbar;
  const double root_lambda = std::pow(m.lambda, 1.0 / m.d);
  const double root_N = std::pow(m.particle_number(), 1.0 / m.d);
  c.over_pi = 1.0 + std::exp(m.beta * root_lambda / kPi);
  c.over_two_pi = 1.0 + std::exp(m.beta * root_lambda / (2.0 * kPi));
  c.level_spacing = 1.0 + std::exp(2.0 * m.beta * m.hbar * root_N);
  c.used = c.low_branch ? 2.0 : std::max({c.over_pi, c.over_two_pi, c.level_spacing});
  return c;
}

FugacitySandwich fugacity_sandwich(const OccupationProfile& fd, double slack) {
  FugacitySandwich s;
  s.constants = fugacity_constants(fd);
  const ModelParams& m = fd.params;
  const double Z_beta = partition_closed(m.d, m.beta, m.hbar);
  s.upper = make_report("fugacity_upper", 0.0, fd.Z_mu, Z_beta, 0.0);
  s.lower = make_report("fugacity_lower", 0.0, Z_beta / s.constants.used, fd.Z_mu, slack);
  return s;
}

BoundReport mu_bound(const OccupationProfile& fd, double slack) {
  if (!fd.mu) throw InvalidArgument("mu_bound needs a Fermi-Dirac profile");
  const ModelParams& m = fd.params;
  const double ground = 0.5 * m.d * m.hbar;
  if (*fd.mu < ground) return make_report("mu_bound", 0.0, *fd.mu, ground, slack);
  const double rhs = 2.0 * std::pow(m.particle_number(), 1.0 / m.d) * m.hbar + ground;
  return make_report("mu_bound", 0.0, *fd.mu, rhs, slack);
}

namespace {

// Builds f(T) for a symmetric tridiagonal T as a dense matrix.
template <class F>
Eigen::MatrixXd tridiagonal_function(const SymTridiagonalXd& t, F&& f) {
  const TridiagonalEigen<double> eig = tridiagonal_eigen(t);
  Eigen::VectorXd fv(eig.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(eig.values(i));
  return eig.vectors * fv.asDiagonal() * eig.vectors.transpose();
}

}  // namespace

double weight_gaussian_norm(double beta, double hbar, int n, long K, bool momentum, long dense_ceiling) {
  if (n < 0) throw InvalidArgument("weight exponent must be nonnegative");
  if (K + 1 > dense_ceiling) throw DenseCeilingExceeded(K + 1, dense_ceiling);
  const ShellTable shells = build_shell_table(1, hbar, K);
  Eigen::MatrixXd weight;
  if (momentum) {
    weight = momentum_weight(shells, WeightSpec{n}) - Eigen::MatrixXd::Identity(K + 1, K + 1);
  } else {
    weight = tridiagonal_function(position_tridiagonal(K, hbar), [n](double v) { return std::pow(std::abs(v), n); });
  }
  Eigen::VectorXd g(K + 1);
  for (long k = 0; k <= K; ++k) g(k) = std::exp(-beta * shells.energies(k));
  const Eigen::MatrixXd op = weight * g.asDiagonal();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(op);
  return svd.singularValues()(0);
}

BoundReport linf_weight_bound(double beta, double hbar, int n, long K, double slack, long dense_ceiling) {
  if (n < 1) throw InvalidArgument("linf_weight_bound: n must be positive");
  const double norm = weight_gaussian_norm(beta, hbar, n, K, false, dense_ceiling);
  const double lhs = std::pow(norm, 2.0 / n);
  const double rhs = n * std::max(2.0 / beta, std::numbers::sqrt2 * hbar);
  return make_report("linf_weight_lemma", kInfinity, lhs, rhs, slack);
}

double classical_weight_maximum(int n, double beta) {
  return std::pow(n / (2.0 * std::numbers::e * beta), 0.5 * n);
}

ClassicalNorm classical_reference_norm(int d, double beta, double p, double rel_tol) {
  if (d < 1 || !(beta > 0.0)) throw InvalidArgument("classical_reference_norm: need d >= 1 and beta > 0");
  if (!(p >= 1.0)) throw InvalidArgument("classical_reference_norm: p must satisfy p >= 1");
  const double Z = std::pow(kPi / beta, d);
  const double amplitude = 2.0 * beta / Z;
  ClassicalNorm out;
  if (std::isinf(p)) {
    // |grad f| = amplitude |z| e^{-beta |z|^2}, maximal at |z|^2 = 1 / (2 beta)
    const double peak = std::exp(-0.5) / std::sqrt(2.0 * beta);
    out.quadrature = amplitude * peak;
    out.gamma_formula = out.quadrature;
    out.ratio = 1.0;
    return out;
  }
  // R = u / sqrt(beta p):  int_0^inf R^{p+2d-1} e^{-beta p R^2} dR = (beta p)^{-(p+2d)/2} int u^{p+2d-1} e^{-u^2} du
  const double a = p + 2.0 * d - 1.0;
  const double u_max = std::sqrt(0.5 * a) + 12.0;
  const AdaptiveResult radial =
      integrate_adaptive([a](double u) { return std::exp(a * std::log(u) - u * u); }, 0.0, u_max, rel_tol);
  const double sphere = 2.0 * std::pow(kPi, d) / std::tgamma(d);  // area of S^{2d-1}
  const double log_scale = -0.5 * (p + 2.0 * d) * std::log(beta * p);
  out.quadrature = amplitude * std::pow(sphere * radial.value * std::exp(log_scale), 1.0 / p);
  const double ball = std::pow(kPi, d) / std::tgamma(d + 1.0);  // volume of the unit ball in R^{2d}
  out.gamma_formula =
      amplitude * std::pow(ball * std::tgamma(0.5 * (2.0 * d + p)) * std::exp(log_scale), 1.0 / p);
  out.ratio = out.quadrature / out.gamma_formula;
  return out;
}

double position_gaussian_norm(const ShellTable& shells, double beta, double s, double p, NormConvention conv) {
  if (!(p >= 1.0)) throw InvalidArgument("position_gaussian_norm: p must satisfy p >= 1");
  const LadderElements ladder{shells.hbar};
  const long K = shells.K;
  const long blocks = shells.d == 1 ? 1 : K + 1;
  // Per transverse chain r (levels j = 0..n-1 on shells j + r), B = x G^s and
  // B^T B = G^s x^2 G^s splits by parity of j into two tridiagonal matrices.
  // G^s is normalized by its value on the lowest shell; the factor is restored at the end.
  const double log_ground = -s * beta * shells.energies(0);
  CompensatedSum<> total;
  double best = 0.0;
  for (long r = 0; r < blocks; ++r) {
    const double mult = shell_multiplicity(r, shells.d - 1);
    const long n = K - r + 1;
    if (mult == 0.0 || n < 2) continue;
    auto x = [&](long j) { return j >= 0 && j + 1 < n ? ladder.offdiag(j) : 0.0; };
    auto g = [&](long j) { return std::exp(-s * beta * (shells.energies(j + r) - shells.energies(0))); };
    for (long parity = 0; parity < 2; ++parity) {
      const long m = (n - parity + 1) / 2;
      if (m == 0) continue;
      SymTridiagonalXd t;
      t.diag.resize(m);
      t.offdiag.resize(std::max<long>(m - 1, 0));
      for (long i = 0; i < m; ++i) {
        const long j = parity + 2 * i;
        t.diag(i) = g(j) * g(j) * (x(j - 1) * x(j - 1) + x(j) * x(j));
        if (i + 1 < m) t.offdiag(i) = g(j) * g(j + 2) * x(j) * x(j + 1);
      }
      if (std::isinf(p)) {
        best = std::max(best, largest_eigenvalue(t));
      } else if (p == 2.0) {
        total += mult * t.diag.sum();
      } else if (p == 4.0) {
        total += mult * (t.diag.squaredNorm() + 2.0 * t.offdiag.squaredNorm());
      } else {
        const Eigen::VectorXd ev = tridiagonal_eigenvalues(t);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < ev.size(); ++i) acc += std::pow(std::max(ev(i), 0.0), 0.5 * p);
        total += mult * acc;
      }
    }
  }
  if (std::isinf(p)) return std::exp(log_ground) * std::sqrt(best);
  const double h = shells.h();
  return std::exp(log_ground) * std::pow(h, conv.prefactor_dim(shells.d) / p) * std::pow(total.value(), 1.0 / p);
}

double split_integral_bound(const OccupationProfile& profile, double p, NormConvention conv, int quadrature_order) {
  const ModelParams& m = profile.params;
  const QuadratureRule<double> rule = gauss_legendre<double>(quadrature_order);
  CompensatedSum<> acc;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    const double s = 0.75 + 0.25 * rule.nodes(i);
    acc += 0.25 * rule.weights(i) * position_gaussian_norm(profile.shells, m.beta, s, p, conv);
  }
  return 2.0 * m.beta / profile.Z_mu * acc.value();
}

SqrtLemmaTerms sqrt_lemma_terms(const OccupationProfile& fd, Direction direction, double p, double q, double r,
                                NormConvention conv) {
  if (fd.kind != StateKind::fermi_dirac) throw InvalidArgument("sqrt lemma needs a Fermi-Dirac profile");
  const double residual = inverse_p(p) - inverse_p(q) - inverse_p(r);
  if (std::abs(residual) > 1e-12) throw InvalidArgument("sqrt lemma: exponents must satisfy 1/p = 1/q + 1/r");
  const Eigen::VectorXd G = fugacity_operator_values(fd);
  const Eigen::VectorXd root_G = G.cwiseSqrt();
  const Eigen::VectorXd root_rho = fd.sqrt_density();
  auto span = [](const Eigen::VectorXd& v) { return std::span<const double>(v.data(), v.size()); };
  SqrtLemmaTerms t;
  t.lhs = block_schatten_norm(sqrt_gradient_blocks(fd, direction), p, conv);
  t.sqrt_G = block_schatten_norm(commutator_blocks(span(root_G), fd.shells, direction), p, conv);
  t.sqrt_rho_q = diagonal_schatten_norm(span(root_rho), fd.shells, q, conv);
  t.grad_G_r = block_schatten_norm(commutator_blocks(span(G), fd.shells, direction), r, conv);
  t.rhs = t.sqrt_G + 0.5 * fd.params.lambda * t.sqrt_rho_q * t.grad_G_r;
  return t;
}

}  // namespace thermreg
