#include "thermreg/gradients.hpp"

#include "thermreg/errors.hpp"
#include "thermreg/quadrature.hpp"

#include <cmath>
#include <string>

namespace thermreg {

const char* to_string(GradientKind kind) { return kind == GradientKind::position ? "D_x" : "D_v"; }

long GradientBlocks::block_count() const { return d == 1 ? 1 : K + 1; }

double GradientBlocks::block_multiplicity(long r) const { return shell_multiplicity(r, d - 1); }

double GradientBlocks::entry(long r, long j) const {
  return std::sqrt(hbar * static_cast<double>(j + 1) / 2.0) * shell_coeff(j + r);
}

SymTridiagonalXd GradientBlocks::block(long r) const {
  if (r < 0 || r >= block_count()) throw InvalidArgument("GradientBlocks::block: index out of range");
  const long n = block_size(r);
  SymTridiagonalXd b;
  b.diag = Eigen::VectorXd::Zero(n);
  b.offdiag.resize(n - 1);
  for (long j = 0; j + 1 < n; ++j) b.offdiag(j) = entry(r, j);
  return b;
}

double GradientBlocks::represented_dimension() const {
  double total = 0.0;
  for (long r = 0; r < block_count(); ++r) total += block_multiplicity(r) * static_cast<double>(block_size(r));
  return total;
}

namespace {

void check_direction(const Direction& dir, int d) {
  if (dir.axis < 0 || dir.axis >= d)
    throw InvalidArgument("gradient axis " + std::to_string(dir.axis) + " outside dimension " + std::to_string(d));
}

GradientBlocks empty_blocks(const ShellTable& shells, Direction direction) {
  GradientBlocks gb;
  gb.direction = direction;
  gb.d = shells.d;
  gb.hbar = shells.hbar;
  gb.K = shells.K;
  gb.shell_coeff.resize(shells.K);
  return gb;
}

}  // namespace

GradientBlocks commutator_blocks(std::span<const double> values, const ShellTable& shells, Direction direction) {
  if (static_cast<long>(values.size()) != shells.K + 1)
    throw InvalidArgument("commutator_blocks: " + std::to_string(values.size()) + " shell values for cutoff " +
                          std::to_string(shells.K));
  check_direction(direction, shells.d);
  GradientBlocks gb = empty_blocks(shells, direction);
  for (long k = 0; k < shells.K; ++k) gb.shell_coeff(k) = (values[k + 1] - values[k]) / shells.hbar;
  return gb;
}

GradientBlocks commutator_blocks(const OccupationProfile& profile, Direction direction) {
  return commutator_blocks(std::span<const double>(profile.density.data(), profile.density.size()), profile.shells,
                           direction);
}

GradientBlocks sqrt_gradient_blocks(const OccupationProfile& profile, Direction direction) {
  const Eigen::VectorXd root = profile.sqrt_density();
  return commutator_blocks(std::span<const double>(root.data(), root.size()), profile.shells, direction);
}

DuhamelResult duhamel_blocks(const OccupationProfile& profile, Direction direction, DuhamelPath path,
                             int quadrature_order) {
  const ShellTable& shells = profile.shells;
  check_direction(direction, shells.d);
  if (path == DuhamelPath::gauss_legendre && quadrature_order < 2)
    throw InvalidArgument("duhamel_blocks: quadrature order must be >= 2");

  const double beta = profile.params.beta;
  const long K = shells.K;
  // log of the diagonal factor a_k entering the integrand, and the resolvent weight lambda
  Eigen::VectorXd log_a(K + 1);
  double lambda = 0.0;
  if (profile.kind == StateKind::fermi_dirac) {
    if (!profile.mu) throw InvalidArgument("duhamel_blocks: Fermi-Dirac profile without mu");
    lambda = profile.params.lambda;
    for (long k = 0; k <= K; ++k) log_a(k) = -beta * (shells.energies(k) - *profile.mu) - std::log(lambda);
  } else {
    const double log_r0 = std::log(profile.density(0));
    for (long k = 0; k <= K; ++k) log_a(k) = log_r0 - beta * (shells.energies(k) - shells.energies(0));
  }

  QuadratureRule<double> rule;
  if (path == DuhamelPath::gauss_legendre) rule = gauss_legendre<double>(quadrature_order);

  auto softplus = [](double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); };
  const double log_lambda = lambda > 0.0 ? std::log(lambda) : 0.0;

  DuhamelResult out{empty_blocks(shells, direction), false};
  for (long k = 0; k < K; ++k) {
    const double la = log_a(k), lb = log_a(k + 1);
    const double t = lb - la;
    if (std::abs(t) > DuhamelResult::kWideRatioLog) out.wide_ratio_warning = true;
    // int_0^1 a^{1-s} b^s ds = a * int_0^1 e^{s t} ds
    double integral;
    if (path == DuhamelPath::analytic) {
      integral = t == 0.0 ? 1.0 : std::expm1(t) / t;
    } else {
      integral = 0.0;
      for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
        const double s = 0.5 * (rule.nodes(i) + 1.0);
        integral += 0.5 * rule.weights(i) * std::exp(s * t);
      }
    }
    double log_coeff = la + std::log(integral);
    if (lambda > 0.0) log_coeff -= softplus(log_lambda + la) + softplus(log_lambda + lb);
    out.blocks.shell_coeff(k) = -beta * std::exp(log_coeff);
  }
  return out;
}

}  // namespace thermreg
