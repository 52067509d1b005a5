#include "litterscan/log.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace litterscan {

namespace {

spdlog::level::level_enum level_from_env()
{
  const char* env = std::getenv("LITTERSCAN_LOG");
  const std::string level = env ? env : "error";
  if (level == "debug") return spdlog::level::debug;
  if (level == "info") return spdlog::level::info;
  return spdlog::level::err;
}

}  // namespace

spdlog::logger& log()
{
  static const auto logger = [] {
    auto l = spdlog::get("litterscan");
    if (!l) l = spdlog::stderr_logger_st("litterscan");
    l->set_pattern("litterscan: %l: %v");
    l->set_level(level_from_env());
    return l;
  }();
  return *logger;
}

void apply_log_level_from_env() { log().set_level(level_from_env()); }

}  // namespace litterscan
