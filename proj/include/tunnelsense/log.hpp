#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

namespace tunnelsense {

enum class LogLevel { error = 0, info = 1, debug = 2 };

// Verbosity from TUNNELSENSE_LOG={error|info|debug}; default error-only.
inline LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("TUNNELSENSE_LOG");
    if (!env) return LogLevel::error;
    std::string s(env);
    if (s == "debug") return LogLevel::debug;
    if (s == "info") return LogLevel::info;
    return LogLevel::error;
  }();
  return level;
}

inline void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::info) std::cerr << "[info] " << msg << "\n";
}

inline void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::debug) std::cerr << "[debug] " << msg << "\n";
}

}  // namespace tunnelsense
