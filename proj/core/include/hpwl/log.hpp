#pragma once

#include <string>

namespace hpwl {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

// Level is read once from HPWL_LOG_LEVEL (error|warn|info|debug); default warn.
LogLevel log_level();

void log(LogLevel level, const std::string& message);

inline void log_warn(const std::string& message) { log(LogLevel::warn, message); }
inline void log_info(const std::string& message) { log(LogLevel::info, message); }

}  // namespace hpwl
