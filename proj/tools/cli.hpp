#pragma once

// Experiment runner behind the `skewlab` executable. Each subcommand writes
// manifest.json, summary.json and CSV tables into its output directory.

#include <string>
#include <vector>

namespace skewlab::cli {

/// Exit codes: 0 success, 1 a blocking assertion failed, 2 bad
/// configuration or unwritable output.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace skewlab::cli
