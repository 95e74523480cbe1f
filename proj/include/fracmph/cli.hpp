#pragma once

// Command-line front end: fracmph <sample|density|laplace|project|verify> ...

#include <iosfwd>
#include <string>
#include <vector>

namespace fracmph::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kCheckFailed = 2,
  kIo = 3,
};

/// Runs the CLI with argv-style arguments (args[0] is the program name).
/// Results go to the file named by --out, or to `out` for "--out -";
/// diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "min:max:steps" into an inclusive linear grid. Points at or
/// below zero are lifted to `floor` when floor > 0.
std::vector<double> parse_grid(const std::string& spec, double floor = 0.0);

/// Parses a comma-separated list of numbers.
std::vector<double> parse_list(const std::string& text);

}  // namespace fracmph::cli
