#pragma once

// CLI commands. Every command renders its outputs in memory first and only
// touches the output directory once all computation succeeded.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cscat/scenario.hpp"

namespace cscat {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitComputation = 3, kExitIo = 4 };

struct OutputFile {
  std::string name;
  std::string body;
  bool csv = false;  // CSV files get the banner line
};

using OutputSet = std::vector<OutputFile>;

OutputSet cmd_amplitudes(const Scenario& sc);
OutputSet cmd_decompose(const Scenario& sc);
OutputSet cmd_evolve(const Scenario& sc);
OutputSet cmd_times(const Scenario& sc);
OutputSet cmd_bohm(const Scenario& sc);

const std::vector<std::string>& command_names();
OutputSet run_named(const std::string& command, const Scenario& sc);

/// "# cscat <version> <command> scenario=<hash> generated=<UTC timestamp>"
std::string banner_line(const std::string& command, const Scenario& sc);

/// Writes every file; CSV files get `banner` as first line when non-empty.
void write_outputs(const OutputSet& files, const std::filesystem::path& dir, const std::string& banner);

struct RunOptions {
  std::filesystem::path scenario;
  std::filesystem::path out_dir;  // empty: scenario output_dir, else "."
  bool banner = true;
  unsigned threads = 1;
};

/// Full command lifecycle with exit-code mapping; diagnostics go to `err`.
int run_command(const std::string& command, const RunOptions& opts, std::ostream& err);

}  // namespace cscat
