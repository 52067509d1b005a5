#pragma once

#include <spdlog/logger.h>

namespace litterscan {

/// The "litterscan" stderr logger. Created on first use with the level taken
/// from LITTERSCAN_LOG (error|info|debug, default error).
spdlog::logger& log();

/// Re-reads LITTERSCAN_LOG.
void apply_log_level_from_env();

}  // namespace litterscan
