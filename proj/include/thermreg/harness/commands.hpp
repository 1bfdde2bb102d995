#pragma once

#include "thermreg/harness/config.hpp"

#include <functional>
#include <ostream>

namespace thermreg::harness {

enum ExitCode : int { kPass = 0, kError = 1, kViolation = 2 };

/// Runs `task(i)` for i in [0, count) on `threads` workers. Exceptions are collected per task.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task);

/// Every command writes its tables to config.output (standard output when empty) and
/// machine-readable error lines "error,<kind>,<message>" to `err`.
int cmd_verify(const SweepConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep_scaling(const SweepConfig& config, std::ostream& out, std::ostream& err);
int cmd_wigner(const SweepConfig& config, std::ostream& out, std::ostream& err);
int cmd_mu_solve(const SweepConfig& config, std::ostream& out, std::ostream& err);
int cmd_selftest(const SweepConfig& config, std::ostream& out, std::ostream& err);

int run_command(Command command, const SweepConfig& config, std::ostream& out, std::ostream& err);

/// Output path of the companion table: "a/b.csv" -> "a/b.<tag>.csv".
std::string companion_path(const std::string& path, const std::string& tag);

}  // namespace thermreg::harness
