#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

namespace hurstqv {

enum class LogLevel { off = 0, info = 1, debug = 2 };

/// Diagnostics level from HURSTQV_LOG in {off, info, debug}; defaults to off.
/// Messages go to standard error only.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("HURSTQV_LOG");
    if (env == nullptr) return LogLevel::off;
    const std::string v(env);
    if (v == "debug") return LogLevel::debug;
    if (v == "info") return LogLevel::info;
    return LogLevel::off;
  }();
  return level;
}

inline void log_info(const std::string& message) {
  if (log_level() >= LogLevel::info) std::cerr << "[hurstqv] " << message << '\n';
}

inline void log_debug(const std::string& message) {
  if (log_level() >= LogLevel::debug) std::cerr << "[hurstqv:debug] " << message << '\n';
}

}  // namespace hurstqv
