#pragma once

#include <string>
#include <vector>

namespace litterscan::cli {

/// Runs one subcommand. `args` excludes the program name. Returns 0 on
/// success and nonzero after printing a one-line diagnostic to stderr.
int run(const std::vector<std::string>& args);

/// Applies LITTERSCAN_LOG (error|info|debug, default error) to the stderr logger.
void configure_logging();

}  // namespace litterscan::cli
