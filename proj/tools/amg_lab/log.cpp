#include "log.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>

#include "amg/error.hpp"

namespace amg::lab {

void init_logging() {
  auto logger = spdlog::get("amg");
  if (!logger) {
    logger = spdlog::stderr_logger_st("amg");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
  }
  const char* env = std::getenv("AMG_LOG");
  const std::string level = env ? env : "info";
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    throw ConfigError("AMG_LOG must be one of error, info, debug (got '" + level + "')");
  }
}

}  // namespace amg::lab
