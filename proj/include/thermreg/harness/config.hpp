#pragma once

#include "thermreg/norms.hpp"

#include <string>
#include <vector>

namespace thermreg::harness {

enum class Command { verify, sweep_scaling, wigner, mu_solve, selftest };

const char* to_string(Command c);

/// Everything a run depends on. There is no randomness; identical configs give identical output.
struct SweepConfig {
  std::vector<int> d;
  std::vector<double> beta;
  std::vector<double> hbar;
  std::vector<double> lambda;
  std::vector<double> p;         // may contain infinity
  std::vector<int> weight_n;     // momentum weight exponents (selftest)
  std::vector<int> moments;      // wigner: moment orders n of |x|^n
  std::vector<std::string> bounds;  // verify: subset of bound ids; empty selects all

  std::string output;
  double tail_tol = 1e-14;
  double mu_tol = 1e-12;
  double slack = 1e-9;
  long dense_ceiling = 4000;
  int threads = 1;
  NormConvention convention;
  double constant_scale = 1.0;  // multiplies C_{d,p}; 1 except when exercising failure paths
  bool timing = false;

  // sweep-scaling
  std::string state = "maxwell_boltzmann";  // maxwell_boltzmann | fermi_dirac | both
  double classical_filter = 0.1;            // keep points with beta * hbar <= filter
  double slope_tolerance = 0.05;

  // wigner
  double wigner_extent = 6.0;  // grid half-width in standard deviations
  int wigner_points = 121;
  double moment_tolerance = 1e-7;
};

/// Grid of the bound invariants: d in {1,2,3}, beta in {0.25,1,4,16}, hbar in {0.8,0.4,0.1,0.02},
/// lambda in {0.1,1,2 pi}, p in {2,4,inf}.
SweepConfig default_config(Command c);

/// Throws InvalidArgument on empty grids or nonpositive tolerances.
void validate(const SweepConfig& c, Command command);

/// `with_threads = false` leaves out the worker count, which never changes results.
std::string to_json(const SweepConfig& c, bool with_threads = true);
/// Keys missing from the text keep the values already in `base`.
SweepConfig from_json(const std::string& text, SweepConfig base);
SweepConfig load_config(const std::string& path, SweepConfig base);

}  // namespace thermreg::harness
