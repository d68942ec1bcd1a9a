#pragma once

#include <spdlog/spdlog.h>

namespace amg::lab {

/// Level from AMG_LOG (error, info, debug); info when unset. An unknown
/// value is a usage error.
void init_logging();

}  // namespace amg::lab
