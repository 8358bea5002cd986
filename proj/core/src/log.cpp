#include "hpwl/log.hpp"

#include <cstdlib>
#include <iostream>

namespace hpwl {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("HPWL_LOG_LEVEL");
    if (!env) return LogLevel::warn;
    const std::string s(env);
    if (s == "error") return LogLevel::error;
    if (s == "info") return LogLevel::info;
    if (s == "debug") return LogLevel::debug;
    return LogLevel::warn;
  }();
  return level;
}

void log(LogLevel level, const std::string& message) {
  if (level > log_level()) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::cerr << "[hpwl:" << names[static_cast<int>(level)] << "] " << message << "\n";
}

}  // namespace hpwl
