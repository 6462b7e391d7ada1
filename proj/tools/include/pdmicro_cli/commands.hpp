#pragma once

#include <string>
#include <vector>

#include "pdmicro_cli/config.hpp"

namespace pdm::cli {

struct OutputFile {
  std::string path;
  std::string bytes;
};

struct RunResult {
  std::vector<OutputFile> files;
  std::string summary;  // printed to stdout, may be empty
};

/// Runs `cmd` and renders its artifacts in memory. Nothing touches the
/// filesystem except reading input_csv. `workers` < 0 defers to the config.
[[nodiscard]] RunResult run_subcommand(Subcommand cmd, const RunConfig& cfg, int workers = -1);

/// Writes every file; if any write fails, the ones already written are
/// removed and the error is rethrown.
void write_outputs(const std::vector<OutputFile>& files);

/// Shortest decimal that round-trips the double.
[[nodiscard]] std::string format_double(double x);

/// Exit status for the exception currently being handled: 2 config error,
/// 4 fit failure, 3 anything else.
[[nodiscard]] int exit_code_for_current_exception();

/// Full command-line entry point.
int run_cli(int argc, char** argv);

}  // namespace pdm::cli
