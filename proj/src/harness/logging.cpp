#include "twinlane/harness/logging.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <string_view>

namespace twinlane {

void init_logging() {
  auto logger = spdlog::stderr_color_mt("twinlane");
  spdlog::set_default_logger(logger);

  const char* env = std::getenv("TWINLANE_LOG_LEVEL");
  const std::string_view level = env ? env : "warn";
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::set_level(spdlog::level::warn);
    if (level != "warn") spdlog::warn("unknown TWINLANE_LOG_LEVEL '{}', using warn", level);
  }
}

}  // namespace twinlane
