#include "thermreg/wigner.hpp"

#include "thermreg/bounds.hpp"
#include "thermreg/errors.hpp"
#include "thermreg/numeric.hpp"
#include "thermreg/quadrature.hpp"
#include "thermreg/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace thermreg {

namespace {

constexpr double kPi = std::numbers::pi;

// Symmetric banded operator on levels 0..n-1: diagonal plus one off-diagonal at `offset`.
struct Banded {
  long n = 0;
  long offset = 1;
  std::function<double(long)> diag;  // may be empty
  std::function<double(long)> off;   // coupling (j, j + offset)
};

// (A^k)_{jj} for j = 0..count-1, applying A to e_j inside a window of width k * offset.
std::vector<double> diagonal_of_power(const Banded& a, int k, long count) {
  std::vector<double> out(count, k == 0 ? 1.0 : 0.0);
  if (k == 0) return out;
  const long reach = static_cast<long>(k) * a.offset;
  for (long j = 0; j < count; ++j) {
    const long lo = std::max(0L, j - reach), hi = std::min(a.n - 1, j + reach);
    const long w = hi - lo + 1;
    std::vector<double> v(w, 0.0), next(w);
    v[j - lo] = 1.0;
    const int half = k / 2;
    auto apply = [&] {
      for (long i = 0; i < w; ++i) {
        const long g = lo + i;
        double s = a.diag ? a.diag(g) * v[i] : 0.0;
        if (i >= a.offset) s += a.off(g - a.offset) * v[i - a.offset];
        if (i + a.offset < w && g + a.offset < a.n) s += a.off(g) * v[i + a.offset];
        next[i] = s;
      }
      v.swap(next);
    };
    for (int step = 0; step < half; ++step) apply();
    if (k % 2 == 0) {
      double s = 0.0;
      for (double x : v) s += x * x;
      out[j] = s;
    } else {
      const std::vector<double> u = v;
      apply();
      double s = 0.0;
      for (long i = 0; i < w; ++i) s += u[i] * v[i];
      out[j] = s;
    }
  }
  return out;
}

// Sum over k_1 + ... + k_d = m of m! / prod k_i! prod M[k_i].
double multinomial_product(const std::vector<double>& M, int d, int m) {
  std::function<double(int, int)> rec = [&](int axes, int left) -> double {
    if (axes == 1) return M[left] / std::tgamma(left + 1.0);
    double s = 0.0;
    for (int k = 0; k <= left; ++k) s += M[k] / std::tgamma(k + 1.0) * rec(axes - 1, left - k);
    return s;
  };
  return std::tgamma(m + 1.0) * rec(d, m);
}

// sum_j w_j <j| |x|^n |j> = 2 int_0^inf x^n sum_j w_j psi_j(x)^2 dx in d = 1. The Hermite
// functions come from their three-term recurrence with a running exponent against underflow.
double odd_moment_1d(const std::vector<double>& w, double hbar, int n) {
  const long K = static_cast<long>(w.size()) - 1;
  const double root = std::sqrt(hbar);
  const double x_max = std::sqrt(2.0 * hbar * (K + 1.0)) + 12.0 * root;
  // half wavelength of the highest level near the origin
  const double step = 0.5 * kPi * root / std::sqrt(2.0 * K + 1.0);
  const int panels = static_cast<int>(std::ceil(x_max / step));
  const QuadratureRule<double> rule = gauss_legendre<double>(16);
  auto density = [&](double x) {
    double log_scale = -0.5 * x * x / hbar - 0.25 * std::log(kPi * hbar);
    double prev = 0.0, cur = 1.0;
    CompensatedSum<> s;
    for (long j = 0; j <= K; ++j) {
      if (w[j] > 0.0 && log_scale > -700.0) s += w[j] * cur * cur * std::exp(2.0 * log_scale);
      const double next = std::sqrt(2.0 / (hbar * (j + 1.0))) * x * cur - std::sqrt(j / (j + 1.0)) * prev;
      prev = cur;
      cur = next;
      if (std::abs(cur) > 1e100) {
        cur *= 1e-100;
        prev *= 1e-100;
        log_scale += 100.0 * std::log(10.0);
      }
    }
    return s.value();
  };
  auto f = [&](double x) { return std::pow(x, n) * density(x); };
  return 2.0 * composite_gauss_legendre<double>(f, 0.0, x_max, panels, rule);
}

}  // namespace

double laguerre(int n, double x) {
  if (n < 0) throw InvalidArgument("laguerre: order must be nonnegative");
  if (n == 0) return 1.0;
  double prev = 1.0, cur = 1.0 - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

double eigen_wigner(int n, double hbar, double z_squared) {
  const double sign = n % 2 == 0 ? 1.0 : -1.0;
  return 2.0 * sign * std::exp(-z_squared / hbar) * laguerre(n, 2.0 * z_squared / hbar);
}

double eigen_wigner_series(double t, double hbar, double z_squared, int n_max) {
  CompensatedSum<> s;
  double tn = 1.0;
  for (int n = 0; n <= n_max; ++n, tn *= t) s += tn * eigen_wigner(n, hbar, z_squared);
  return s.value();
}

double eigen_wigner_generating(double t, double hbar, double z_squared) {
  return 2.0 / (1.0 + t) * std::exp(-(z_squared / hbar) * (1.0 - t) / (1.0 + t));
}

double PhaseSpaceGaussian::rate() const { return beta * theta(0.5 * beta * hbar); }

double PhaseSpaceGaussian::prefactor() const { return std::pow(rate() / (2.0 * kPi), d); }

double PhaseSpaceGaussian::operator()(std::span<const double> z) const {
  if (static_cast<long>(z.size()) != 2L * d) throw InvalidArgument("PhaseSpaceGaussian: point must have 2d coordinates");
  double r2 = 0.0;
  for (double v : z) r2 += v * v;
  return at_squared_radius(r2);
}

PhaseSpaceGaussian thermal_wigner(int d, double beta, double hbar) {
  if (d < 1 || !(beta > 0.0) || !(hbar > 0.0)) throw InvalidArgument("thermal_wigner: invalid parameters");
  return PhaseSpaceGaussian{d, beta, hbar};
}

double thermal_moment_closed(int d, double beta, double hbar, double n) {
  const double half_rate = 0.5 * beta * theta(0.5 * beta * hbar);
  return moment_constant(d, n) / std::pow(half_rate, 0.5 * n);
}

double thermal_moment_spectral(const OccupationProfile& mb, int n, bool momentum) {
  if (mb.kind != StateKind::maxwell_boltzmann) throw InvalidArgument("thermal_moment_spectral: needs a Maxwell-Boltzmann profile");
  if (n < 0) throw InvalidArgument("thermal_moment_spectral: n must be nonnegative");
  const int d = mb.params.d;
  const double beta = mb.params.beta, hbar = mb.params.hbar;
  const long K = mb.K();
  if (d > 1 && n % 2 != 0) throw InvalidArgument("thermal_moment_spectral: odd n needs d = 1");

  // Box weights e^{-beta hbar j}, j = 0..K, normalized to sum 1.
  std::vector<double> w(K + 1);
  CompensatedSum<> z;
  for (long j = 0; j <= K; ++j) z += (w[j] = std::exp(-beta * hbar * j));
  for (double& v : w) v /= z.value();

  if (n == 0) return 1.0;
  const int m = n / 2;
  // Extended levels so the retained diagonal is free of truncation effects.
  const long levels = K + 2 * m + 3;

  if (n % 2 != 0) {
    // The momentum representation of level j is (-i)^j times its position one, so the
    // diagonal of |p|^n equals that of |x|^n.
    (void)momentum;
    return odd_moment_1d(w, hbar, n);
  }

  const LadderElements ladder{hbar};
  std::vector<double> M(m + 1);
  for (int k = 0; k <= m; ++k) {
    std::vector<double> diag;
    if (momentum) {
      Banded p2{levels, 2, [hbar](long j) { return hbar * (j + 0.5); },
                [hbar](long j) { return -0.5 * hbar * std::sqrt((j + 1.0) * (j + 2.0)); }};
      diag = diagonal_of_power(p2, k, K + 1);
    } else {
      Banded x{levels, 1, {}, [ladder](long j) { return ladder.offdiag(j); }};
      diag = diagonal_of_power(x, 2 * k, K + 1);
    }
    CompensatedSum<> s;
    for (long j = 0; j <= K; ++j) s += w[j] * diag[j];
    M[k] = s.value();
  }
  return multinomial_product(M, d, m);
}

PhaseSpaceMoment phase_space_moment(const PhaseSpaceGaussian& f, int n, double rel_tol) {
  if (n < 0) throw InvalidArgument("phase_space_moment: n must be nonnegative");
  const int d = f.d;
  const double rate = f.rate();
  // z = u sqrt(2 / rate) turns f(z) dz into pi^{-d} e^{-|u|^2} du on R^{2d}.
  const double scale = std::sqrt(2.0 / rate);

  auto tensor = [&](int order) {
    const QuadratureRule<double> gh = gauss_hermite<double>(order);
    const int dims = 2 * d;
    std::vector<int> idx(dims, 0);
    CompensatedSum<> s;
    while (true) {
      double weight = 1.0, x2 = 0.0;
      for (int a = 0; a < dims; ++a) {
        const double u = gh.nodes(idx[a]);
        weight *= gh.weights(idx[a]);
        if (a < d) x2 += u * u;
      }
      s += weight * std::pow(scale * scale * x2, 0.5 * n);
      int a = 0;
      while (a < dims && ++idx[a] == order) idx[a++] = 0;
      if (a == dims) break;
    }
    return s.value() / std::pow(kPi, d);
  };

  auto radial = [&](int order) {
    // position radial integral times a Hermite rule over momentum
    const QuadratureRule<double> gh = gauss_hermite<double>(order);
    CompensatedSum<> mom;
    std::vector<int> idx(d, 0);
    while (true) {
      double weight = 1.0;
      for (int a = 0; a < d; ++a) weight *= gh.weights(idx[a]);
      mom += weight;
      int a = 0;
      while (a < d && ++idx[a] == order) idx[a++] = 0;
      if (a == d) break;
    }
    const double momentum_part = mom.value() / std::pow(kPi, 0.5 * d);
    const double sphere = 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
    const double a = n + d - 1.0;
    const double u_max = std::sqrt(0.5 * a) + 12.0;
    const AdaptiveResult r = integrate_adaptive(
        [a](double u) { return u == 0.0 ? (a == 0.0 ? 1.0 : 0.0) : std::exp(a * std::log(u) - u * u); }, 0.0,
        u_max, rel_tol);
    // int_{R^d} |x|^n (rate/(2 pi))^{d/2} e^{-rate |x|^2 / 2} dx with |x| = scale u
    return momentum_part * sphere * std::pow(scale, n) * r.value / std::pow(kPi, 0.5 * d);
  };

  PhaseSpaceMoment out;
  const int max_order = d == 1 ? 256 : 64;
  double prev = 0.0;
  for (int order = 4; order <= max_order; order *= 2) {
    const double cur = n % 2 == 0 ? tensor(order) : radial(order);
    if (order > 4 && std::abs(cur - prev) <= rel_tol * std::abs(cur)) {
      out.value = cur;
      out.order = order;
      return out;
    }
    prev = cur;
  }
  throw ConvergenceError("phase_space_moment: Hermite order doubling did not converge");
}

}  // namespace thermreg
