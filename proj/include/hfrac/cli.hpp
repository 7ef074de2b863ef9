#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace hfrac {

enum ExitCode : int {
  exit_ok = 0,
  exit_config_error = 1,
  exit_numerical_error = 2,
  exit_invariant_violation = 3,
};

struct RunConfig {
  /// cell | evolve | sweep | sigma-probe | verify
  std::string command;
  std::filesystem::path config;
  std::filesystem::path out;
  bool verbose = false;
  int jobs = 1;
  /// Seed for sampled minimality checks; other paths ignore it.
  std::optional<std::uint64_t> seed;
};

/// Executes one command and writes its artifacts into rc.out. Errors are
/// reported on `err` and mapped to the exit codes above; numerical failures
/// leave diagnostic.txt and invariant violations witness.txt in rc.out.
int execute(const RunConfig& rc, std::ostream& out, std::ostream& err);

/// Parses argv and calls execute().
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hfrac
