#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

namespace potlp {

enum class log_level : int { error = 0, info = 1, debug = 2 };

/* Verbosity comes from the POTLP_LOG environment variable
 * (error | info | debug); unset or unrecognized values mean error. */
inline log_level active_log_level() {
  static log_level level = [] {
    const char* raw = std::getenv("POTLP_LOG");
    if (raw == nullptr) return log_level::error;
    std::string v(raw);
    if (v == "debug") return log_level::debug;
    if (v == "info") return log_level::info;
    return log_level::error;
  }();
  return level;
}

inline bool log_enabled(log_level level) {
  return static_cast<int>(level) <= static_cast<int>(active_log_level());
}

inline void log_line(log_level level, const std::string& msg) {
  if (!log_enabled(level)) return;
  const char* tag = level == log_level::error ? "error" : level == log_level::info ? "info" : "debug";
  std::cerr << "[potlp:" << tag << "] " << msg << '\n';
}

} // namespace potlp
