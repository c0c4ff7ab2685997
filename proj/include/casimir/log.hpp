#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace casimir::log {

enum class level : int { error = 0, warn = 1, info = 2, debug = 3 };

// Threshold comes from CASIMIR_LOG (error|warn|info|debug); default warn.
inline level threshold() {
  static const level cached = [] {
    const char* env = std::getenv("CASIMIR_LOG");
    if (env == nullptr) return level::warn;
    if (std::strcmp(env, "error") == 0) return level::error;
    if (std::strcmp(env, "warn") == 0) return level::warn;
    if (std::strcmp(env, "info") == 0) return level::info;
    if (std::strcmp(env, "debug") == 0) return level::debug;
    return level::warn;
  }();
  return cached;
}

inline void emit(level lvl, const std::string& msg) {
  if (static_cast<int>(lvl) > static_cast<int>(threshold())) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "casimir [%s] %s\n", names[static_cast<int>(lvl)], msg.c_str());
}

inline void error(const std::string& msg) { emit(level::error, msg); }
inline void warn(const std::string& msg) { emit(level::warn, msg); }
inline void info(const std::string& msg) { emit(level::info, msg); }
inline void debug(const std::string& msg) { emit(level::debug, msg); }

}  // namespace casimir::log
