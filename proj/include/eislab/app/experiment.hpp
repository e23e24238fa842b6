#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "eislab/app/config.hpp"

namespace eislab {

struct Assertion {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ExperimentResult {
  std::string command;
  std::vector<Assertion> assertions;
  // File names written, relative to the output directory.
  std::vector<std::string> files;
  bool passed() const;
};

inline const std::vector<std::string>& experiment_commands() {
  static const std::vector<std::string> c{"two-period", "figure1", "solve", "statics", "shock", "identify"};
  return c;
}

// Worker count from EISLAB_WORKERS; hardware concurrency when unset. Throws
// ConfigError on a value that is not a positive integer.
std::size_t workers_from_env();

// Runs one subcommand and writes its CSV files into `dir`, which must exist.
// Throws on invalid input; assertion failures are reported in the result.
ExperimentResult run_command(const std::string& command, const Config& cfg, const std::filesystem::path& dir,
                             std::uint64_t seed, std::size_t workers);

struct ExperimentOptions {
  std::string command;
  std::filesystem::path config;
  std::filesystem::path out;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

// Loads the configuration, runs the subcommand in a staging directory and
// moves the outputs and summary.json into `out` only when nothing threw.
// Prints one line per assertion to `log`. Exit code: 0 when every assertion
// passed, 1 when some failed, 2 on invalid input or a runtime error (no
// files written).
int run_experiment(const ExperimentOptions& opt, std::ostream& log, std::ostream& err);

}  // namespace eislab
