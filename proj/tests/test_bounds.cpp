#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "thermreg/bounds.hpp"
#include "thermreg/errors.hpp"

#include <cmath>
#include <numbers>

using namespace thermreg;
using std::numbers::pi;

namespace {

ModelParams make(int d, double hbar, double beta, double lambda) {
  ModelParams m;
  m.d = d;
  m.hbar = hbar;
  m.beta = beta;
  m.lambda = lambda;
  return m;
}

double dual_exponent_inverse(double p) { return std::isinf(p) ? 1.0 : 1.0 - 1.0 / p; }

// closed form of the classical gradient norm via polar coordinates in R^{2d}
double classical_oracle(int d, double beta, double p) {
  const double Z = std::pow(pi / beta, d);
  const double A = 2.0 * beta / Z;
  if (std::isinf(p)) return A * std::exp(-0.5) / std::sqrt(2.0 * beta);
  const double sphere = 2.0 * std::pow(pi, d) / std::tgamma(d);
  const double a = 0.5 * (2 * d + p);
  const double radial = std::tgamma(a) / (2.0 * std::pow(p * beta, a));
  return std::pow(sphere * std::pow(A, p) * radial, 1.0 / p);
}

}  // namespace

TEST_CASE("theta") {
  CHECK(theta(0.0) == 1.0);
  CHECK(theta(1.0) == doctest::Approx(std::tanh(1.0)).epsilon(1e-15));
  CHECK(theta(1e-6) == doctest::Approx(1.0 - 1e-12 / 3.0).epsilon(1e-15));
  double prev = 1.0;
  for (double x = 0.01; x < 50.0; x *= 1.5) {
    CHECK(theta(x) < prev);
    prev = theta(x);
  }
}

TEST_CASE("constants of the main bound") {
  CHECK(moment_constant(3, 2.0) == doctest::Approx(1.5));
  CHECK(moment_constant(2, 1.0) == doctest::Approx(std::sqrt(pi) / 2.0));
  for (int d : {1, 2, 3}) {
    const MainBoundFactors f = main_bound_factors(d, 1.0, 0.1, 1.0, kInfinity);
    CHECK(f.C_dp == doctest::Approx(std::pow(2.0, 1.25)));
    const MainBoundFactors g = main_bound_factors(d, 1.0, 0.1, 1.0, 2.0);
    const double expected = std::pow(2.0, 1.25 + (2 * d + 1) / 2.0) * std::sqrt(d / 2.0) * std::pow(pi, d / 2.0);
    CHECK(g.C_dp == doctest::Approx(expected).epsilon(1e-14));
    CHECK(g.max_factor == doctest::Approx(1.0));
  }
  // beta hbar above 2 sqrt 2 switches the max
  const MainBoundFactors f = main_bound_factors(1, 10.0, 1.0, 1.0, 4.0);
  CHECK(f.max_factor == doctest::Approx(std::pow(10.0, 0.25)));
  CHECK(f.theta_factor == doctest::Approx(std::pow(std::tanh(10.0) / 10.0, -0.25)));
  CHECK(f.rhs == doctest::Approx(f.C_dp * f.beta_factor * f.max_factor * f.theta_factor * f.inverse_Z));
}

TEST_CASE("main bound scales like beta^{1/2 + d/p'} in the semiclassical regime") {
  const double hbar = 1e-7;
  for (int d : {1, 2, 3})
    for (double p : {2.0, 4.0, kInfinity}) {
      const double beta = 1.5;
      const double a = main_bound_factors(d, beta, hbar, std::pow(pi / beta, d), p).rhs;
      const double b = main_bound_factors(d, 2 * beta, hbar, std::pow(pi / (2 * beta), d), p).rhs;
      CHECK(b / a == doctest::Approx(std::pow(2.0, 0.5 + d * dual_exponent_inverse(p))).epsilon(1e-9));
    }
}

TEST_CASE("main bound holds at sample points") {
  for (int d : {1, 2})
    for (double hbar : {0.5, 0.05})
      for (double beta : {0.5, 4.0}) {
        const OccupationProfile fd = thermal_profile(make(d, hbar, beta, 1.0), StateKind::fermi_dirac);
        for (double p : {2.0, 4.0, kInfinity})
          for (GradientKind kind : {GradientKind::position, GradientKind::velocity}) {
            const double lhs = gradient_norm(fd, {kind, 0}, p);
            CHECK(lhs > 0.0);
            CHECK(lhs <= rhs_main_bound(fd, p));
          }
        CHECK(gradient_norm(fd, {}, kInfinity) <= linf_gradient_rhs(beta, hbar, fd.Z_mu));
      }
  const OccupationProfile fd = thermal_profile(make(1, 0.2, 1.0, 1.0), StateKind::fermi_dirac);
  CHECK(rhs_main_bound(fd, 2.0, 1e-3) == doctest::Approx(1e-3 * rhs_main_bound(fd, 2.0)));
}

TEST_CASE("reports") {
  const BoundReport r = make_report("x", 2.0, 1.0, 2.0);
  CHECK(r.pass);
  CHECK(r.ratio == 0.5);
  CHECK(!make_report("x", 2.0, 1.0 + 1e-6, 1.0).pass);
  CHECK(make_report("x", 2.0, 1.0 + 1e-12, 1.0).pass);
  CHECK(!make_report("x", 2.0, 1.0 + 1e-12, 1.0, 0.0).pass);
  CHECK(!make_report("x", 2.0, std::nan(""), 1.0).pass);
}

TEST_CASE("fugacity constants and sandwich") {
  for (int d : {1, 2, 3})
    for (double beta : {0.25, 1.0, 4.0})
      for (double hbar : {0.8, 0.1})
        for (double lambda : {0.1, 1.0, 2 * pi}) {
          const OccupationProfile fd = thermal_profile(make(d, hbar, beta, lambda), StateKind::fermi_dirac);
          const FugacitySandwich s = fugacity_sandwich(fd);
          const FugacityConstants& c = s.constants;
          const double N = lambda / std::pow(2 * pi * hbar, d);
          if (!c.low_branch) {
            CHECK(c.over_pi == doctest::Approx(c.level_spacing).epsilon(1e-12));
            CHECK(c.over_pi == doctest::Approx(1.0 + std::exp(2.0 * beta * hbar * std::pow(N, 1.0 / d))).epsilon(1e-12));
            CHECK(c.over_two_pi <= c.over_pi);
          } else {
            CHECK(c.used == 2.0);
          }
          CHECK(s.upper.slack == 0.0);
          CHECK(s.upper.pass);
          CHECK(s.lower.pass);
          CHECK(mu_bound(fd).pass);
        }
}

TEST_CASE("mu bound on a tight example") {
  // d = 1, hbar = 1, lambda = 1/3 gives N = 3/(2 pi): mu lies in the level window
  const OccupationProfile fd = thermal_profile(make(1, 1.0, 2.0, 2 * pi / 3.0), StateKind::fermi_dirac);
  const BoundReport r = mu_bound(fd);
  CHECK(r.pass);
  CHECK(r.lhs == fd.mu);
}

TEST_CASE("weight lemma") {
  SUBCASE("classical maximum by brute force") {
    for (int n : {1, 2, 4})
      for (double beta : {0.5, 2.0}) {
        double best = 0.0;
        for (double x = 0.0; x < 20.0; x += 1e-5) best = std::max(best, std::pow(x, n) * std::exp(-beta * x * x));
        CHECK(classical_weight_maximum(n, beta) == doctest::Approx(best).epsilon(1e-8));
      }
  }
  SUBCASE("position and momentum weights agree") {
    for (int n : {1, 2, 3, 4})
      for (double hbar : {1.0, 0.3}) {
        const double x = weight_gaussian_norm(1.0, hbar, n, 120, false);
        const double p = weight_gaussian_norm(1.0, hbar, n, 120, true);
        CHECK(x == doctest::Approx(p).epsilon(1e-9));
      }
  }
  SUBCASE("n = 0 is the top of e^{-beta H}") {
    CHECK(weight_gaussian_norm(2.0, 0.5, 0, 40) == doctest::Approx(std::exp(-2.0 * 0.25)).epsilon(1e-13));
  }
  SUBCASE("lemma at the sample point") {
    for (int n : {1, 2, 4}) {
      const BoundReport r = linf_weight_bound(1.0, 0.5, n, 400);
      CHECK(r.pass);
      CHECK(r.rhs == doctest::Approx(n * 2.0));
    }
  }
  SUBCASE("stable in the cutoff") {
    const double a = weight_gaussian_norm(1.0, 0.5, 2, 200);
    const double b = weight_gaussian_norm(1.0, 0.5, 2, 400);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("classical reference norm") {
  for (int d : {1, 2, 3})
    for (double beta : {0.5, 1.0, 3.0})
      for (double p : {1.0, 2.0, 3.0, 4.0, kInfinity}) {
        const ClassicalNorm c = classical_reference_norm(d, beta, p);
        CHECK(c.quadrature == doctest::Approx(classical_oracle(d, beta, p)).epsilon(1e-10));
        if (!std::isinf(p)) CHECK(c.ratio == doctest::Approx(std::pow(d, 1.0 / p)).epsilon(1e-10));
      }
  for (int d : {1, 2})
    for (double p : {2.0, 4.0, kInfinity}) {
      const double a = classical_reference_norm(d, 1.0, p).quadrature;
      const double b = classical_reference_norm(d, 2.0, p).quadrature;
      CHECK(b / a == doctest::Approx(std::pow(2.0, 0.5 + d * dual_exponent_inverse(p))).epsilon(1e-6));
    }
}

TEST_CASE("split integral dominates the gradient") {
  for (int d : {1, 2})
    for (double hbar : {0.5, 0.1})
      for (double lambda : {0.1, 1.0}) {
        const OccupationProfile mb = thermal_profile(make(d, hbar, 1.0, lambda), StateKind::maxwell_boltzmann);
        for (double p : {2.0, 4.0, kInfinity}) {
          const double lhs = gradient_norm(mb, {GradientKind::velocity, 0}, p);
          CHECK(lhs <= split_integral_bound(mb, p) * (1.0 + 1e-9));
        }
      }
}

TEST_CASE("position gaussian norm") {
  // s -> 0 limit on a single level reduces to the x matrix element
  const ShellTable shells = build_shell_table(1, 1.0, 1);
  const double v = position_gaussian_norm(shells, 1.0, 0.0, kInfinity);
  CHECK(v == doctest::Approx(std::sqrt(0.5)).epsilon(1e-13));
}

TEST_CASE("square root lemma") {
  for (int d : {1, 2})
    for (double hbar : {0.5, 0.1})
      for (double lambda : {0.1, 1.0, 2 * pi}) {
        const OccupationProfile fd = thermal_profile(make(d, hbar, 1.0, lambda), StateKind::fermi_dirac);
        for (GradientKind kind : {GradientKind::position, GradientKind::velocity}) {
          const SqrtLemmaTerms a = sqrt_lemma_terms(fd, {kind, 0}, 2.0, 4.0, 4.0);
          CHECK(a.lhs <= a.rhs * (1.0 + 1e-9));
          const SqrtLemmaTerms b = sqrt_lemma_terms(fd, {kind, 0}, 2.0, 2.0, kInfinity);
          CHECK(b.lhs <= b.rhs * (1.0 + 1e-9));
          CHECK(a.lhs == doctest::Approx(b.lhs));
        }
      }
  const OccupationProfile fd = thermal_profile(make(1, 0.5, 1.0, 1.0), StateKind::fermi_dirac);
  CHECK_THROWS_AS(sqrt_lemma_terms(fd, {}, 2.0, 3.0, 3.0), InvalidArgument);
}
