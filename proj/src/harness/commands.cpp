#include "thermreg/harness/commands.hpp"

#include "thermreg/bounds.hpp"
#include "thermreg/errors.hpp"
#include "thermreg/gradients.hpp"
#include "thermreg/harness/csv.hpp"
#include "thermreg/norms.hpp"
#include "thermreg/oracle/dense.hpp"
#include "thermreg/thermal_states.hpp"
#include "thermreg/tridiagonal.hpp"
#include "thermreg/wigner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace thermreg::harness {

namespace {

using Clock = std::chrono::steady_clock;
using std::to_string;

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const BracketError*>(&e)) return "bracket";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence";
  if (dynamic_cast<const DenseCeilingExceeded*>(&e)) return "dense_ceiling";
  if (dynamic_cast<const InvalidArgument*>(&e)) return "invalid_argument";
  return "error";
}

void report_error(std::ostream& err, const std::exception& e, const std::string& where = {}) {
  std::string msg = e.what();
  if (!where.empty()) msg = where + ": " + msg;
  err << "error," << error_kind(e) << "," << quote_field(msg) << "\n";
}

std::string timestamp() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void add_manifest(CsvTable& table, Command command, const SweepConfig& c) {
  table.manifest("generated", timestamp());
  table.manifest("command", to_string(command));
  table.manifest("config", to_json(c, false));
  table.manifest("schatten_exponent", c.convention.scale == SchattenScale::dimension ? "d/p" : "3/p");
  table.manifest("zero_weight", c.convention.zero_weight_is_identity ? "m = identity" : "m = 2 identity");
}

void emit(const CsvTable& table, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-")
    table.write(out);
  else
    table.write_file(path);
}

std::string fmt(double v) { return format_double(v); }

std::string fmt_p(double p) { return std::isinf(p) ? "inf" : format_double(p); }

// Grid points in sorted key order (d, beta, hbar, lambda).
struct GridPoint {
  int d;
  double beta, hbar, lambda;
};

std::vector<GridPoint> grid(const SweepConfig& c) {
  auto sorted = [](auto v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  std::vector<GridPoint> g;
  for (int d : sorted(c.d))
    for (double b : sorted(c.beta))
      for (double h : sorted(c.hbar))
        for (double l : sorted(c.lambda)) g.push_back({d, b, h, l});
  return g;
}

ModelParams params_of(const GridPoint& g, const SweepConfig& c) {
  ModelParams m;
  m.d = g.d;
  m.beta = g.beta;
  m.hbar = g.hbar;
  m.lambda = g.lambda;
  m.tail_tol = c.tail_tol;
  m.mu_tol = c.mu_tol;
  m.validate();
  return m;
}

// Profiles for gradient norms: the retained tail covers n_k and sqrt(E_k) weights.
OccupationProfile norm_profile(const ModelParams& m, StateKind kind) { return thermal_profile(m, kind, 1.0, 1.0); }

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool selected(const SweepConfig& c, const std::string& id) {
  if (c.bounds.empty()) return true;
  return std::any_of(c.bounds.begin(), c.bounds.end(),
                     [&](const std::string& b) { return id.rfind(b, 0) == 0; });
}

struct TaskOutcome {
  std::vector<std::vector<std::string>> rows;
  bool violation = false;
  std::optional<std::string> error;  // formatted error line
};

}  // namespace

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(count, 1));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string companion_path(const std::string& path, const std::string& tag) {
  if (path.empty() || path == "-") return path;
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + "." + tag;
  return path.substr(0, dot) + "." + tag + path.substr(dot);
}

int cmd_verify(const SweepConfig& c, std::ostream& out, std::ostream& err) {
  validate(c, Command::verify);
  const std::vector<GridPoint> points = grid(c);
  const std::vector<double> ps = sorted_unique(c.p);
  std::vector<TaskOutcome> outcomes(points.size());

  parallel_for(points.size(), c.threads, [&](std::size_t i) {
    const GridPoint& g = points[i];
    TaskOutcome& o = outcomes[i];
    const auto start = Clock::now();
    try {
      const ModelParams m = params_of(g, c);
      const OccupationProfile fd = norm_profile(m, StateKind::fermi_dirac);
      const OccupationProfile mb = norm_profile(m, StateKind::maxwell_boltzmann);
      const double Z_closed = partition_closed(m.d, m.beta, m.hbar);
      const Direction dx{GradientKind::position, 0};

      auto push = [&](const OccupationProfile& prof, const std::string& p_field, const BoundReport& r,
                      bool gated = true) {
        const double ms =
            c.timing ? std::chrono::duration<double, std::milli>(Clock::now() - start).count() : 0.0;
        const bool is_fd = prof.kind == StateKind::fermi_dirac;
        o.rows.push_back({to_string(g.d), fmt(g.beta), fmt(g.hbar), fmt(g.lambda), is_fd ? fmt(*prof.mu) : "",
                          fmt(Z_closed), fmt(is_fd ? prof.Z_mu : Z_closed), p_field, "0", r.bound_id, fmt(r.lhs),
                          fmt(r.rhs), fmt(r.ratio), r.pass ? "1" : "0", to_string(prof.K()),
                          fmt(prof.tail.relative_tail), fmt(ms)});
        if (gated && !r.pass) o.violation = true;
      };

      for (double p : ps) {
        if (selected(c, "main_bound")) {
          const double lhs = gradient_norm(fd, dx, p, c.convention);
          const double rhs = main_bound_factors(m.d, m.beta, m.hbar, fd.Z_mu, p, c.constant_scale).rhs;
          push(fd, fmt_p(p), make_report("main_bound", p, lhs, rhs, c.slack));
          const double lhs_g = gradient_norm(mb, dx, p, c.convention);
          const double rhs_g = main_bound_factors(m.d, m.beta, m.hbar, Z_closed, p, c.constant_scale).rhs;
          push(mb, fmt_p(p), make_report("main_bound_gibbs", p, lhs_g, rhs_g, c.slack));
        }
        if (std::isinf(p) && selected(c, "linf_gradient")) {
          const double lhs = gradient_norm(fd, dx, p, c.convention);
          push(fd, "inf", make_report("linf_gradient", p, lhs, linf_gradient_rhs(m.beta, m.hbar, fd.Z_mu), c.slack));
          const double lhs_g = gradient_norm(mb, dx, p, c.convention);
          push(mb, "inf",
               make_report("linf_gradient_gibbs", p, lhs_g, linf_gradient_rhs(m.beta, m.hbar, Z_closed), c.slack));
        }
      }
      if (selected(c, "fugacity")) {
        const FugacitySandwich s = fugacity_sandwich(fd, c.slack);
        push(fd, "", s.upper);
        push(fd, "", s.lower);
        if (!s.constants.low_branch) {
          // Each published constant separately; informational, the gate uses the largest.
          const std::pair<const char*, double> variants[] = {{"fugacity_lower_over_pi", s.constants.over_pi},
                                                             {"fugacity_lower_over_two_pi", s.constants.over_two_pi},
                                                             {"fugacity_lower_level_spacing", s.constants.level_spacing}};
          for (const auto& [id, C] : variants)
            push(fd, "", make_report(id, 0.0, Z_closed / C, fd.Z_mu, c.slack), false);
        }
      }
      if (selected(c, "mu_bound")) push(fd, "", mu_bound(fd, c.slack));
      if (selected(c, "sqrt_lemma")) {
        const SqrtLemmaTerms a = sqrt_lemma_terms(fd, dx, 2.0, 4.0, 4.0, c.convention);
        push(fd, "2", make_report("sqrt_lemma_2_4_4", 2.0, a.lhs, a.rhs, c.slack));
        const SqrtLemmaTerms b = sqrt_lemma_terms(fd, dx, 2.0, 2.0, kInfinity, c.convention);
        push(fd, "2", make_report("sqrt_lemma_2_2_inf", 2.0, b.lhs, b.rhs, c.slack));
      }
    } catch (const Error& e) {
      std::ostringstream line;
      report_error(line, e,
                   "d=" + to_string(g.d) + " beta=" + fmt(g.beta) + " hbar=" + fmt(g.hbar) + " lambda=" + fmt(g.lambda));
      o.error = line.str();
    }
  });

  CsvTable table({"d", "beta", "hbar", "lambda", "mu", "Z_beta", "Z_mu", "p", "n", "bound_id", "lhs", "rhs", "ratio",
                  "pass", "K_used", "tail_est", "wall_ms"});
  add_manifest(table, Command::verify, c);
  bool violation = false, failed = false;
  for (TaskOutcome& o : outcomes) {
    for (auto& r : o.rows) table.add_row(std::move(r));
    violation = violation || o.violation;
    if (o.error) {
      err << *o.error;
      failed = true;
    }
  }
  emit(table, c.output, out);
  if (failed) return kError;
  return violation ? kViolation : kPass;
}

namespace {

struct Fit {
  double slope = 0.0;
  double stderr_ = 0.0;
  std::size_t points = 0;
};

Fit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 4) throw InvalidArgument("regression needs at least 4 points, got " + to_string(n));
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += std::pow(std::log(x[i]) - mx, 2);
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
  }
  Fit f;
  f.points = n;
  f.slope = sxy / sxx;
  double ssr = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::log(y[i]) - my - f.slope * (std::log(x[i]) - mx);
    ssr += r * r;
  }
  f.stderr_ = n > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
  return f;
}

double conjugate(double p) { return std::isinf(p) ? 1.0 : p / (p - 1.0); }

}  // namespace

int cmd_sweep_scaling(const SweepConfig& c, std::ostream& out, std::ostream& err) {
  validate(c, Command::sweep_scaling);
  const std::vector<double> betas = sorted_unique(c.beta), hbars = sorted_unique(c.hbar),
                            lambdas = sorted_unique(c.lambda), ps = sorted_unique(c.p);
  std::vector<int> ds = c.d;
  std::sort(ds.begin(), ds.end());
  ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
  if (betas.size() < 4 && hbars.size() < 4) {
    err << "error,invalid_argument,\"regression refused: need at least 4 beta or 4 hbar points\"\n";
    return kError;
  }
  std::vector<StateKind> kinds;
  if (c.state != "fermi_dirac") kinds.push_back(StateKind::maxwell_boltzmann);
  if (c.state != "maxwell_boltzmann") kinds.push_back(StateKind::fermi_dirac);

  struct Sample {
    int d;
    double beta, hbar, lambda;
    StateKind kind;
    std::optional<double> mu;
    long K;
    std::vector<double> dx, dv;  // per p
    double max_singular;
    std::vector<double> classical;
  };
  std::vector<Sample> samples;
  for (int d : ds)
    for (double h : hbars)
      for (double l : lambdas)
        for (double b : betas)
          for (StateKind k : kinds) samples.push_back({d, b, h, l, k, std::nullopt, 0, {}, {}, 0.0, {}});

  std::mutex err_mutex;
  bool failed = false;
  parallel_for(samples.size(), c.threads, [&](std::size_t i) {
    Sample& s = samples[i];
    try {
      ModelParams m = params_of({s.d, s.beta, s.hbar, s.lambda}, c);
      const OccupationProfile prof = norm_profile(m, s.kind);
      s.mu = prof.mu;
      s.K = prof.K();
      for (double p : ps) {
        s.dx.push_back(gradient_norm(prof, {GradientKind::position, 0}, p, c.convention));
        s.dv.push_back(gradient_norm(prof, {GradientKind::velocity, 0}, p, c.convention));
        s.classical.push_back(classical_reference_norm(s.d, s.beta, p).quadrature);
      }
      // Both ends of every block, without the symmetry shortcut of the p = inf path.
      // Only worth the cost when the sweep asks for p = inf.
      s.max_singular = NAN;
      if (std::any_of(ps.begin(), ps.end(), [](double p) { return std::isinf(p); })) {
        const GradientBlocks gb = commutator_blocks(prof, {GradientKind::position, 0});
        s.max_singular = 0.0;
        for (long r = 0; r < gb.block_count(); ++r)
          if (gb.block_multiplicity(r) > 0.0 && gb.block_size(r) > 1)
            s.max_singular = std::max(s.max_singular, spectral_radius(gb.block(r)));
      }
    } catch (const Error& e) {
      std::lock_guard lock(err_mutex);
      report_error(err, e, "sweep-scaling d=" + to_string(s.d) + " beta=" + fmt(s.beta) + " hbar=" + fmt(s.hbar));
      failed = true;
    }
  });
  if (failed) return kError;

  CsvTable table({"d", "p", "state", "beta", "hbar", "lambda", "mu", "K_used", "norm_D_x", "norm_D_v",
                  "max_singular", "classical_norm", "mb_gap"});
  add_manifest(table, Command::sweep_scaling, c);
  auto find_mb = [&](const Sample& s) -> const Sample* {
    for (const Sample& t : samples)
      if (t.kind == StateKind::maxwell_boltzmann && t.d == s.d && t.beta == s.beta && t.hbar == s.hbar &&
          t.lambda == s.lambda)
        return &t;
    return nullptr;
  };
  for (std::size_t ip = 0; ip < ps.size(); ++ip) {
    for (const Sample& s : samples) {
      std::string gap;
      if (s.kind == StateKind::fermi_dirac)
        if (const Sample* mb = find_mb(s)) gap = fmt(std::abs(s.dx[ip] - mb->dx[ip]) / mb->dx[ip]);
      table.add_row({to_string(s.d), fmt_p(ps[ip]), thermreg::to_string(s.kind), fmt(s.beta), fmt(s.hbar),
                     fmt(s.lambda), s.mu ? fmt(*s.mu) : "", to_string(s.K), fmt(s.dx[ip]), fmt(s.dv[ip]),
                     std::isnan(s.max_singular) ? "" : fmt(s.max_singular), fmt(s.classical[ip]), gap});
    }
  }

  CsvTable slopes({"d", "p", "state", "variable", "fixed_beta", "fixed_hbar", "lambda", "points", "slope", "stderr",
                   "expected", "rel_dev", "pass"});
  add_manifest(slopes, Command::sweep_scaling, c);
  bool violation = false;
  for (int d : ds)
    for (std::size_t ip = 0; ip < ps.size(); ++ip)
      for (StateKind kind : kinds)
        for (double l : lambdas) {
          if (betas.size() >= 4) {
            for (double h : hbars) {
              std::vector<double> x, y;
              for (const Sample& s : samples)
                if (s.d == d && s.kind == kind && s.hbar == h && s.lambda == l && s.beta * h <= c.classical_filter) {
                  x.push_back(s.beta);
                  y.push_back(s.dx[ip]);
                }
              if (x.size() < 4) {
                err << "error,invalid_argument,\"regression refused: fewer than 4 points with beta*hbar <= filter at hbar="
                    << fmt(h) << "\"\n";
                return kError;
              }
              const Fit f = fit_loglog(x, y);
              const double expected = 0.5 + d / conjugate(ps[ip]);
              const double dev = std::abs(f.slope - expected) / expected;
              const bool pass = dev <= c.slope_tolerance;
              violation = violation || !pass;
              slopes.add_row({to_string(d), fmt_p(ps[ip]), thermreg::to_string(kind), "beta", "", fmt(h), fmt(l),
                              to_string(f.points), fmt(f.slope), fmt(f.stderr_), fmt(expected), fmt(dev),
                              pass ? "1" : "0"});
            }
          }
          if (hbars.size() >= 4) {
            for (double b : betas) {
              std::vector<double> x, y;
              for (const Sample& s : samples)
                if (s.d == d && s.kind == kind && s.beta == b && s.lambda == l) {
                  x.push_back(s.hbar);
                  y.push_back(s.dx[ip]);
                }
              const Fit f = fit_loglog(x, y);
              slopes.add_row({to_string(d), fmt_p(ps[ip]), thermreg::to_string(kind), "hbar", fmt(b), "", fmt(l),
                              to_string(f.points), fmt(f.slope), fmt(f.stderr_), "", "", ""});
            }
          }
        }
  emit(table, c.output, out);
  emit(slopes, companion_path(c.output, "slopes"), out);
  return violation ? kViolation : kPass;
}

int cmd_wigner(const SweepConfig& c, std::ostream& out, std::ostream& err) {
  validate(c, Command::wigner);
  std::vector<int> ds = c.d;
  std::sort(ds.begin(), ds.end());
  ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
  std::vector<int> ns = c.moments;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  CsvTable samples({"d", "beta", "hbar", "x", "xi", "f"});
  add_manifest(samples, Command::wigner, c);
  samples.manifest("plane", "(x_1, xi_1) marginal of the thermal Wigner function; equals it for d = 1");
  CsvTable moments({"d", "beta", "hbar", "n", "closed", "spectral_x", "spectral_p", "phase_space", "rel_err_x",
                    "rel_err_p", "rel_err_phase", "pass"});
  add_manifest(moments, Command::wigner, c);

  bool violation = false;
  for (int d : ds)
    for (double b : sorted_unique(c.beta))
      for (double h : sorted_unique(c.hbar)) {
        try {
          const PhaseSpaceGaussian plane = thermal_wigner(1, b, h);
          const PhaseSpaceGaussian full = thermal_wigner(d, b, h);
          const double half_width = c.wigner_extent / std::sqrt(plane.rate());
          const int n_pts = c.wigner_points;
          const double step = 2.0 * half_width / (n_pts - 1);
          double trapezoid = 0.0;
          for (int i = 0; i < n_pts; ++i)
            for (int j = 0; j < n_pts; ++j) {
              const double x = -half_width + i * step, xi = -half_width + j * step;
              const double f = plane.at_squared_radius(x * x + xi * xi);
              const double w = (i == 0 || i == n_pts - 1 ? 0.5 : 1.0) * (j == 0 || j == n_pts - 1 ? 0.5 : 1.0);
              trapezoid += w * f * step * step;
              samples.add_row({to_string(d), fmt(b), fmt(h), fmt(x), fmt(xi), fmt(f)});
            }
          samples.manifest("integral d=" + to_string(d) + " beta=" + fmt(b) + " hbar=" + fmt(h), fmt(trapezoid));
          samples.manifest("peak d=" + to_string(d) + " beta=" + fmt(b) + " hbar=" + fmt(h), fmt(full.prefactor()));

          ModelParams m = params_of({d, b, h, 1.0}, c);
          const int n_max = ns.back();
          const OccupationProfile mb = thermal_profile(m, StateKind::maxwell_boltzmann, 1.0, 0.5 * n_max + 1.0);
          for (int n : ns) {
            const double closed = thermal_moment_closed(d, b, h, n);
            const bool spectral_ok = d == 1 || n % 2 == 0;
            const double sx = spectral_ok ? thermal_moment_spectral(mb, n, false) : NAN;
            const double sp = spectral_ok ? thermal_moment_spectral(mb, n, true) : NAN;
            const double ps = phase_space_moment(full, n).value;
            auto rel = [&](double v) { return std::abs(v - closed) / closed; };
            const bool pass = (!spectral_ok || (rel(sx) < c.moment_tolerance && rel(sp) < c.moment_tolerance)) &&
                              rel(ps) < c.moment_tolerance;
            violation = violation || !pass;
            moments.add_row({to_string(d), fmt(b), fmt(h), to_string(n), fmt(closed), spectral_ok ? fmt(sx) : "",
                             spectral_ok ? fmt(sp) : "", fmt(ps), spectral_ok ? fmt(rel(sx)) : "",
                             spectral_ok ? fmt(rel(sp)) : "", fmt(rel(ps)), pass ? "1" : "0"});
          }
        } catch (const Error& e) {
          report_error(err, e, "wigner d=" + to_string(d) + " beta=" + fmt(b) + " hbar=" + fmt(h));
          return kError;
        }
      }
  emit(samples, c.output, out);
  emit(moments, companion_path(c.output.empty() ? std::string() : c.output, "moments"), out);
  return violation ? kViolation : kPass;
}

int cmd_mu_solve(const SweepConfig& c, std::ostream& out, std::ostream& err) {
  validate(c, Command::mu_solve);
  CsvTable table({"d", "beta", "hbar", "lambda", "N", "mu", "Z_mu", "Z_beta_closed", "Z_beta_spectral", "K_used",
                  "residual", "tail_est"});
  add_manifest(table, Command::mu_solve, c);
  for (const GridPoint& g : grid(c)) {
    try {
      const ModelParams m = params_of(g, c);
      const OccupationProfile fd = thermal_profile(m, StateKind::fermi_dirac);
      const double residual = fermi_shell_sum(fd.shells, m.beta, *fd.mu) - m.particle_number();
      table.add_row({to_string(g.d), fmt(g.beta), fmt(g.hbar), fmt(g.lambda), fmt(m.particle_number()), fmt(*fd.mu),
                     fmt(fd.Z_mu), fmt(partition_closed(m.d, m.beta, m.hbar)), fmt(fd.Z_beta), to_string(fd.K()),
                     fmt(residual), fmt(fd.tail.relative_tail)});
    } catch (const Error& e) {
      report_error(err, e, "mu-solve d=" + to_string(g.d) + " beta=" + fmt(g.beta) + " hbar=" + fmt(g.hbar));
      return kError;
    }
  }
  emit(table, c.output, out);
  return kPass;
}

namespace {

double max_rel_diff(Eigen::VectorXd a, Eigen::VectorXd b) {
  if (a.size() != b.size()) return kInfinity;
  std::sort(a.data(), a.data() + a.size());
  std::sort(b.data(), b.data() + b.size());
  const double scale = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), 1e-300});
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

Eigen::VectorXd expand(const SingularSpectrum& s) {
  std::vector<double> v;
  for (Eigen::Index i = 0; i < s.values.size(); ++i)
    for (long k = 0; k < std::lround(s.weights(i)); ++k) v.push_back(s.values(i));
  return Eigen::Map<Eigen::VectorXd>(v.data(), v.size());
}

}  // namespace

int cmd_selftest(const SweepConfig& c, std::ostream& out, std::ostream& err) {
  validate(c, Command::selftest);
  struct Check {
    std::string name;
    double deviation;
    double tolerance;
  };
  std::vector<Check> checks;
  const long Ks[] = {4, 8, 12};
  try {
    for (int d : c.d) {
      if (d > 2) continue;
      for (double b : sorted_unique(c.beta))
        for (double h : sorted_unique(c.hbar))
          for (long K : Ks) {
            const std::string tag =
                "d=" + to_string(d) + " beta=" + fmt(b) + " hbar=" + fmt(h) + " K=" + to_string(K);
            ModelParams m = params_of({d, b, h, c.lambda.front()}, c);
            const ShellTable shells = build_shell_table(d, h, K);
            const OccupationProfile fd = solve_chemical_potential(m, shells);
            const oracle::DenseBasis basis(d, K);
            const oracle::DenseOperator rho = oracle::dense_state(fd, c.dense_ceiling);
            const double hh = shells.h(), dim = c.convention.prefactor_dim(d);
            double grad_dev = 0.0, duhamel_dev = 0.0, schatten_dev = 0.0;
            for (GradientKind kind : {GradientKind::position, GradientKind::velocity})
              for (int axis = 0; axis < d; ++axis) {
                const Direction dir{kind, axis};
                const GradientBlocks gb = commutator_blocks(fd, dir);
                const Eigen::VectorXd dense =
                    oracle::singular_values(oracle::dense_gradient(rho, basis, h, dir).entries);
                grad_dev = std::max(grad_dev, max_rel_diff(dense, expand(singular_spectrum(gb, c.convention))));
                const GradientBlocks du = duhamel_blocks(fd, dir).blocks;
                const double scale = gb.shell_coeff.cwiseAbs().maxCoeff();
                duhamel_dev = std::max(duhamel_dev, (du.shell_coeff - gb.shell_coeff).cwiseAbs().maxCoeff() / scale);
                for (double p : c.p) {
                  const double fast = block_schatten_norm(gb, p, c.convention);
                  const double ref = oracle::schatten(dense, hh, dim, p);
                  schatten_dev = std::max(schatten_dev, std::abs(fast - ref) / ref);
                }
              }
            checks.push_back({"gradient spectra " + tag, grad_dev, 1e-10});
            checks.push_back({"duhamel entries " + tag, duhamel_dev, 1e-12});
            checks.push_back({"schatten norms " + tag, schatten_dev, 1e-10});
            if (K <= 8) {
              const std::vector<double> values(fd.density.data(), fd.density.data() + fd.density.size());
              double sob_dev = 0.0;
              for (int n : c.weight_n)
                for (double p : c.p) {
                  const double fast = sobolev_norm(values, shells, WeightSpec{n}, p, c.convention, c.dense_ceiling).total;
                  double ref = oracle::dense_sobolev(values, d, K, h, n, p, dim);
                  if (n == 0 && !c.convention.zero_weight_is_identity) ref *= 2.0;
                  sob_dev = std::max(sob_dev, std::abs(fast - ref) / ref);
                }
              checks.push_back({"sobolev norms " + tag, sob_dev, 1e-10});
            }
          }
    }
  } catch (const Error& e) {
    report_error(err, e, "selftest");
    return kError;
  }
  bool ok = true;
  for (const Check& ch : checks) {
    const bool pass = ch.deviation <= ch.tolerance;
    ok = ok && pass;
    out << (pass ? "PASS " : "FAIL ") << ch.name << " deviation=" << fmt(ch.deviation) << " tol=" << fmt(ch.tolerance)
        << "\n";
  }
  out << (ok ? "selftest passed" : "selftest FAILED") << " (" << checks.size() << " checks)\n";
  return ok ? kPass : kViolation;
}

int run_command(Command command, const SweepConfig& config, std::ostream& out, std::ostream& err) {
  try {
    switch (command) {
      case Command::verify: return cmd_verify(config, out, err);
      case Command::sweep_scaling: return cmd_sweep_scaling(config, out, err);
      case Command::wigner: return cmd_wigner(config, out, err);
      case Command::mu_solve: return cmd_mu_solve(config, out, err);
      case Command::selftest: return cmd_selftest(config, out, err);
    }
  } catch (const Error& e) {
    report_error(err, e);
    return kError;
  } catch (const std::exception& e) {
    err << "error,internal," << quote_field(e.what()) << "\n";
    return kError;
  }
  return kError;
}

}  // namespace thermreg::harness
