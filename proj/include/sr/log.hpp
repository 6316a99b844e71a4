#pragma once

#include <string_view>

namespace sr {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

// Threshold comes from the SR_LOG_LEVEL environment variable
// (error|warn|info|debug), default warn. Read once per process.
LogLevel log_level();

void log(LogLevel level, std::string_view message);

inline void log_warn(std::string_view message) { log(LogLevel::kWarn, message); }
inline void log_info(std::string_view message) { log(LogLevel::kInfo, message); }
inline void log_debug(std::string_view message) { log(LogLevel::kDebug, message); }

}  // namespace sr
