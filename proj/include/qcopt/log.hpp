#pragma once

#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>

namespace qcopt {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

/// Log level comes from the QCOPT_LOG environment variable only
/// (error|warn|info|debug); default is warn.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("QCOPT_LOG");
    if (!env) return LogLevel::warn;
    const std::string_view v(env);
    if (v == "error") return LogLevel::error;
    if (v == "warn") return LogLevel::warn;
    if (v == "info") return LogLevel::info;
    if (v == "debug") return LogLevel::debug;
    return LogLevel::warn;
  }();
  return level;
}

inline void log(LogLevel level, const std::string& message) {
  if (level > log_level()) return;
  const char* tag = level == LogLevel::error ? "error"
                    : level == LogLevel::warn ? "warn"
                    : level == LogLevel::info ? "info"
                                              : "debug";
  std::cerr << "[" << tag << "] " << message << "\n";
}

inline void log_info(const std::string& message) { log(LogLevel::info, message); }
inline void log_warn(const std::string& message) { log(LogLevel::warn, message); }
inline void log_error(const std::string& message) { log(LogLevel::error, message); }

}  // namespace qcopt
