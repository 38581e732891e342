#pragma once

#include <spdlog/spdlog.h>

namespace lidar_anchor {

/// Applies LIDAR_ANCHOR_LOG (error|warn|info|debug) to the default logger,
/// which writes to stderr. Unknown values fall back to `info`.
void init_logging();

}  // namespace lidar_anchor
