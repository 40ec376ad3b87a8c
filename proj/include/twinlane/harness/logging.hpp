#pragma once

namespace twinlane {

/// Sets the spdlog level from TWINLANE_LOG_LEVEL (error, warn, info, debug);
/// unset or unrecognised values fall back to warn. Logs go to stderr.
void init_logging();

}  // namespace twinlane
