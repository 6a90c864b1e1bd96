#pragma once

#include <string>
#include <vector>

namespace chronoslyap::cli {

/// Exit statuses of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one subcommand; args excludes the program name. Failures are written
/// to <out>/error.json and mapped to the exit statuses above.
int run(const std::vector<std::string>& args);

}  // namespace chronoslyap::cli
