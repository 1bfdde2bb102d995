#include "thermreg/errors.hpp"
#include "thermreg/harness/commands.hpp"
#include "thermreg/harness/config.hpp"
#include "thermreg/harness/csv.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

using namespace thermreg;
using namespace thermreg::harness;

int main(int argc, char** argv) {
  CLI::App app{"Thermal-state gradient norms of the harmonic oscillator and checks of their bounds"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_path;
  std::optional<int> threads;
  std::optional<std::string> schatten;
  std::optional<std::string> zero_weight;
  std::optional<long> dense_ceiling;
  std::optional<double> slack;
  std::optional<double> constant_scale;
  bool timing = false;

  app.add_option("--config", config_path, "JSON config file (keys override the command defaults)");
  app.add_option("--out", out_path, "output CSV path ('-' for standard output)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--schatten-exponent", schatten, "exponent D in the prefactor h^{D/p}")
      ->check(CLI::IsMember({"d", "3"}));
  app.add_option("--zero-weight", zero_weight, "meaning of the weight exponent n = 0")
      ->check(CLI::IsMember({"identity", "two"}));
  app.add_option("--dense-ceiling", dense_ceiling, "largest dimension materialized densely")->check(CLI::PositiveNumber);
  app.add_option("--slack", slack, "relative slack of bound checks")->check(CLI::PositiveNumber);
  app.add_option("--constant-scale", constant_scale, "multiply C_{d,p} (failure-path testing)")
      ->check(CLI::PositiveNumber)
      ->group("");
  app.add_flag("--timing", timing, "fill the wall_ms column (output is then not reproducible)");
  app.fallthrough();

  const std::pair<const char*, Command> commands[] = {
      {"verify", Command::verify},       {"sweep-scaling", Command::sweep_scaling}, {"wigner", Command::wigner},
      {"mu-solve", Command::mu_solve},   {"selftest", Command::selftest}};
  const char* help[] = {"check every bound on a parameter grid", "norm scaling in beta or hbar with slope fits",
                        "thermal Wigner samples and moment comparisons", "chemical potential for each grid point",
                        "fast paths against the dense reference"};
  Command chosen = Command::verify;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* sub = app.add_subcommand(commands[i].first, help[i]);
    const Command c = commands[i].second;
    sub->callback([&chosen, c] { chosen = c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kError;
  }

  SweepConfig config = default_config(chosen);
  try {
    if (!config_path.empty()) config = load_config(config_path, config);
  } catch (const Error& e) {
    std::cerr << "error,invalid_argument," << quote_field(e.what()) << "\n";
    return kError;
  }
  if (out_path) config.output = *out_path;
  if (threads) config.threads = *threads;
  if (schatten) config.convention.scale = *schatten == "d" ? SchattenScale::dimension : SchattenScale::three;
  if (zero_weight) config.convention.zero_weight_is_identity = *zero_weight == "identity";
  if (dense_ceiling) config.dense_ceiling = *dense_ceiling;
  if (slack) config.slack = *slack;
  if (constant_scale) config.constant_scale = *constant_scale;
  if (timing) config.timing = true;

  return run_command(chosen, config, std::cout, std::cerr);
}
