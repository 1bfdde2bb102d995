#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "thermreg/errors.hpp"
#include "thermreg/thermal_states.hpp"

#include <cmath>
#include <numbers>

using namespace thermreg;

namespace {

constexpr double kPi = std::numbers::pi;

// h * sum_j e^{-beta (j + 1/2) hbar}, summed until the terms vanish.
double geometric_partition_1d(double beta, double hbar) {
  double s = 0.0;
  for (long j = 0; j < 1000000; ++j) {
    const double t = std::exp(-beta * (j + 0.5) * hbar);
    s += t;
    if (t < 1e-300 || t < 1e-18 * s) break;
  }
  return 2.0 * kPi * hbar * s;
}

// Plain bisection on sum_k (1 + e^{beta (E_k - mu)})^{-1} = N in d = 1.
double bisect_mu_1d(double beta, double hbar, double N, long K) {
  auto count = [&](double mu) {
    double s = 0.0;
    for (long k = 0; k <= K; ++k) s += 1.0 / (1.0 + std::exp(beta * ((k + 0.5) * hbar - mu)));
    return s;
  };
  double lo = -100.0, hi = (K + 0.5) * hbar;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (count(mid) < N ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ModelParams make(int d, double hbar, double beta, double lambda) {
  ModelParams m;
  m.d = d;
  m.hbar = hbar;
  m.beta = beta;
  m.lambda = lambda;
  return m;
}

}  // namespace

TEST_CASE("closed-form partition function") {
  CHECK(partition_closed(1, 1.0, 1e-9) == doctest::Approx(2.0 * kPi).epsilon(1e-12));
  CHECK(partition_closed(1, 1.0, 1.0) == doctest::Approx(kPi / std::sinh(0.5)).epsilon(1e-14));
  CHECK(partition_closed(1, 1.0, 1.0) == doctest::Approx(6.02883).epsilon(1e-6));
  CHECK(partition_closed(1, 1.0, 1.0) == doctest::Approx(geometric_partition_1d(1.0, 1.0)).epsilon(1e-13));
  const double z2 = geometric_partition_1d(2.0, 0.5);
  CHECK(partition_closed(2, 2.0, 0.5) == doctest::Approx(z2 * z2).epsilon(1e-13));
  // pi^2 / shc(1/2)^2
  CHECK(partition_closed(2, 2.0, 0.5) == doctest::Approx(9.0866842).epsilon(1e-7));
  for (double b : {0.1, 1.0, 7.0})
    for (double h : {0.01, 0.5, 1.0}) CHECK(partition_closed(3, b, h) <= std::pow(2.0 * kPi / b, 3));
}

TEST_CASE("log-space partition function for large beta hbar") {
  // ln Z = ln(h) - beta hbar / 2 - ln(1 - e^{-beta hbar}) per dimension
  const double beta = 200.0, hbar = 1.0;
  const double expected = 2.0 * (std::log(2.0 * kPi * hbar) - 0.5 * beta * hbar - std::log1p(-std::exp(-beta * hbar)));
  CHECK(log_partition_closed(2, beta, hbar) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(partition_closed(2, beta, hbar) >= 0.0);
}

TEST_CASE("spectral partition function") {
  {
    const SpectralPartition z = partition_spectral(build_shell_table(1, 1.0, 80), 1.0);
    CHECK(std::abs(z.value / partition_closed(1, 1.0, 1.0) - 1.0) < 1e-12);
  }
  {
    ModelParams m = make(3, 0.2, 0.5, 1.0);
    const long K = choose_cutoff(m, StateKind::maxwell_boltzmann);
    const SpectralPartition z = partition_spectral(build_shell_table(3, 0.2, K), 0.5);
    CHECK(std::abs(z.value / partition_closed(3, 0.5, 0.2) - 1.0) < m.tail_tol * 10);
    CHECK(z.relative_tail <= m.tail_tol);
  }
  {
    const SpectralPartition z = partition_spectral(build_shell_table(1, 1.0, 5), 10.0);
    CHECK(std::abs(z.value / partition_closed(1, 10.0, 1.0) - 1.0) < 1e-8);
  }
}

TEST_CASE("zero-temperature filling") {
  const ModelParams m = make(1, 1.0, 50.0, 2.0 * kPi);
  const OccupationProfile fd = thermal_profile(m, StateKind::fermi_dirac);
  REQUIRE(fd.mu);
  CHECK(*fd.mu > 0.5);
  CHECK(*fd.mu < 1.5);
  CHECK(fd.level_occupation(0) > 0.99);
  CHECK(fd.level_occupation(0) <= 1.0);
}

TEST_CASE("chemical potential against an independent bisection") {
  const ModelParams m = make(1, 1.0, 1.0, 2.0 * kPi);
  const OccupationProfile fd = solve_chemical_potential(m, build_shell_table(1, 1.0, 200));
  const double mu = bisect_mu_1d(1.0, 1.0, 1.0, 200);
  CHECK(*fd.mu == doctest::Approx(mu).epsilon(1e-11));
  CHECK(std::abs(fermi_shell_sum(fd.shells, 1.0, *fd.mu) - 1.0) <= 1e-12);
  CHECK(std::abs(fd.normalization() - 1.0) <= 1e-12);
  CHECK(fd.Z_mu == doctest::Approx(m.lambda * std::exp(-m.beta * *fd.mu)).epsilon(1e-14));
}

TEST_CASE("dilute regime stays on the low branch") {
  const ModelParams m = make(2, 0.05, 1.0, 0.01);
  const OccupationProfile fd = thermal_profile(m, StateKind::fermi_dirac);
  CHECK(*fd.mu <= m.d * m.hbar / 2.0);
  const double Z = partition_closed(2, 1.0, 0.05);
  CHECK(fd.Z_mu <= Z);
  CHECK(fd.Z_mu >= Z / 2.0);
}

TEST_CASE("Maxwell-Boltzmann ground shell") {
  const ModelParams m = make(1, 1.0, 1.0, 1.0);
  const OccupationProfile mb = occupations(m, build_shell_table(1, 1.0, 120), StateKind::maxwell_boltzmann);
  CHECK(mb.density(0) * m.h() == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
  CHECK(mb.density(0) * m.h() == doctest::Approx(0.632121).epsilon(1e-6));
  CHECK(std::abs(mb.normalization() - 1.0) < 1e-14);
  CHECK(!mb.mu);
  CHECK(mb.Z_mu == mb.Z_beta);
}

TEST_CASE("low density: Fermi-Dirac approaches the Boltzmann shape") {
  const ModelParams m = make(2, 0.3, 1.5, 1e-6);
  const OccupationProfile fd = thermal_profile(m, StateKind::fermi_dirac);
  double worst = 0.0;
  for (long k = 0; k <= fd.K(); ++k) {
    if (fd.level_occupation(k) == 0.0) continue;
    const double ratio = fd.level_occupation(k) * fd.Z_mu / (m.lambda * std::exp(-m.beta * fd.shells.energies(k)));
    worst = std::max(worst, std::abs(ratio - 1.0));
  }
  CHECK(worst < 1e-4);
  for (long k = 0; k + 1 <= 10; ++k)
    CHECK(fd.level_occupation(k + 1) / fd.level_occupation(k) == doctest::Approx(std::exp(-m.beta * m.hbar)).epsilon(1e-5));
}

TEST_CASE("profile invariants on a grid") {
  for (int d : {1, 2, 3})
    for (double beta : {0.25, 1.0, 4.0})
      for (double hbar : {0.1, 0.5, 0.9})
        for (double lambda : {0.1, 1.0, 2.0 * kPi}) {
          const ModelParams m = make(d, hbar, beta, lambda);
          const OccupationProfile fd = thermal_profile(m, StateKind::fermi_dirac);
          CHECK(std::abs(fd.normalization() - 1.0) <= 1e-12);
          for (long k = 0; k < fd.K(); ++k) {
            CHECK(fd.level_occupation(k) < 1.0 + 1e-15);
            if (fd.level_occupation(k + 1) > 0.0) CHECK(fd.level_occupation(k + 1) < fd.level_occupation(k));
          }
          CHECK(lambda * fd.density.maxCoeff() <= 1.0);
          // the shell sum increases with mu
          const double mu = *fd.mu;
          CHECK(fermi_shell_sum(fd.shells, beta, mu - 0.01) < fermi_shell_sum(fd.shells, beta, mu));
          CHECK(fermi_shell_sum(fd.shells, beta, mu) < fermi_shell_sum(fd.shells, beta, mu + 0.01));
        }
}

TEST_CASE("unreachable filling is reported") {
  const ModelParams m = make(1, 1.0, 1.0, 2.0 * kPi * 5.0);  // N = 5 states needed
  CHECK_THROWS_AS(solve_chemical_potential(m, build_shell_table(1, 1.0, 3)), BracketError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(make(1, -1.0, 1.0, 1.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(make(1, 1.0, 0.0, 1.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(make(1, 1.0, 1.0, -2.0).validate(), InvalidArgument);
  CHECK(make(2, 0.5, 1.0, 3.0).particle_number() == doctest::Approx(3.0 / std::pow(kPi, 2)));
}

TEST_CASE("fermi factor is stable") {
  CHECK(fermi_factor(0.0) == 0.5);
  CHECK(fermi_factor(800.0) == doctest::Approx(std::exp(-800.0)));
  CHECK(fermi_factor(-800.0) == 1.0);
}
